#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "bamcbr/service/core.hpp"

namespace bamcbr::service {

struct HttpOptions {
    std::chrono::milliseconds heartbeat{1000};
    std::size_t max_events_per_chunk = 256;
};

// HTTP/1.1 front end. Endpoints (JSON bodies):
//   GET  /state
//   GET  /cases?outcome=&partition=&cursor=&limit=
//   GET  /revisions?status=pending|decided
//   POST /revisions/{id}/decision   {"verdict": "approve|adjust|reject",
//                                    "target": "ATCS" | "actions": [...], "note": ""}
//   GET  /events?since=N[&follow=0]  line-delimited events; heartbeats when idle
// Unknown or decided revisions answer 409; malformed requests 400.
class HttpServer {
public:
    explicit HttpServer(ServiceCore& core, HttpOptions options = {});
    ~HttpServer();

    // Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace bamcbr::service
