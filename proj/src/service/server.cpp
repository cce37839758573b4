#include "bamcbr/service/server.hpp"

#include <atomic>
#include <charconv>

#include "httplib.h"

#include "bamcbr/binding.hpp"
#include "cbr/json_codec.hpp"

namespace bamcbr::service {

namespace {

void send_json(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump() + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message)
{
    send_json(res, status, {{"error", message}});
}

std::optional<std::uint64_t> parse_uint(const std::string& text)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
    return v;
}

Verdict parse_verdict_body(const std::string& body)
{
    const auto j = json::parse(body);
    if (!j.is_object()) throw std::invalid_argument("body must be a JSON object");
    const auto kind_it = j.find("verdict");
    if (kind_it == j.end() || !kind_it->is_string()) throw std::invalid_argument("verdict is required");
    const auto kind = parse_verdict(kind_it->get<std::string>());
    if (!kind) throw std::invalid_argument("verdict must be approve, adjust or reject");
    Verdict v;
    v.kind = *kind;
    if (auto it = j.find("note"); it != j.end()) {
        if (!it->is_string()) throw std::invalid_argument("note must be a string");
        v.note = it->get<std::string>();
    }
    if (auto it = j.find("target"); it != j.end()) {
        const auto model = it->is_string() ? bamsim::parse_model(it->get<std::string>()) : std::nullopt;
        if (!model) throw std::invalid_argument("target must be MAM, RDM or ATCS");
        v.actions.push_back(switch_action(*model));
    }
    if (auto it = j.find("actions"); it != j.end()) {
        if (!it->is_array()) throw std::invalid_argument("actions must be an array");
        for (const auto& a : *it) v.actions.push_back(cbr::action_from_json(a));
    }
    return v;
}

}  // namespace

struct HttpServer::Impl {
    ServiceCore& core;
    HttpOptions options;
    httplib::Server server;
    std::atomic<bool> stopping{false};

    Impl(ServiceCore& c, HttpOptions o) : core(c), options(o) { routes(); }

    void routes()
    {
        server.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, core.state());
        });

        server.Get("/cases", [this](const httplib::Request& req, httplib::Response& res) {
            CaseQuery q;
            if (req.has_param("outcome")) {
                q.outcome = cbr::parse_outcome(req.get_param_value("outcome"));
                if (!q.outcome) return send_error(res, 400, "outcome must be positive, negative or unvalidated");
            }
            if (req.has_param("partition")) q.partition = req.get_param_value("partition");
            if (req.has_param("cursor")) q.cursor = req.get_param_value("cursor");
            if (req.has_param("limit")) {
                const auto limit = parse_uint(req.get_param_value("limit"));
                if (!limit || *limit == 0) return send_error(res, 400, "limit must be a positive integer");
                q.limit = static_cast<std::size_t>(*limit);
            }
            try {
                const auto page = core.cases(q);
                send_json(res, 200,
                          {{"cases", page.cases},
                           {"next_cursor", page.next_cursor ? json(*page.next_cursor) : json(nullptr)}});
            } catch (const std::invalid_argument& e) {
                send_error(res, 400, e.what());
            }
        });

        server.Get("/revisions", [this](const httplib::Request& req, httplib::Response& res) {
            std::optional<RevisionStatus> status;
            if (req.has_param("status")) {
                const auto s = req.get_param_value("status");
                if (s == "pending") {
                    status = RevisionStatus::pending;
                } else if (s == "decided") {
                    status = RevisionStatus::decided;
                } else {
                    return send_error(res, 400, "status must be pending or decided");
                }
            }
            send_json(res, 200, {{"revisions", core.revisions(status)}});
        });

        server.Post(R"(/revisions/([^/]+)/decision)", [this](const httplib::Request& req, httplib::Response& res) {
            const auto id = parse_uint(req.matches[1]);
            if (!id) return send_error(res, 409, "unknown revision " + std::string(req.matches[1]));
            Verdict verdict;
            try {
                verdict = parse_verdict_body(req.body);
            } catch (const std::exception& e) {
                return send_error(res, 400, e.what());
            }
            try {
                send_json(res, 200, core.submit_decision(*id, verdict));
            } catch (const RevisionError& e) {
                send_error(res, e.code() == RevisionError::Code::invalid ? 400 : 409, e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, e.what());
            }
        });

        server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
            std::uint64_t since = 0;
            if (req.has_param("since")) {
                const auto v = parse_uint(req.get_param_value("since"));
                if (!v) return send_error(res, 400, "since must be a non-negative integer");
                since = *v;
            }
            const bool follow = !req.has_param("follow") || req.get_param_value("follow") != "0";
            if (!follow) {
                std::string body;
                const auto events = core.events().since(since, SIZE_MAX, std::chrono::milliseconds(0));
                for (const auto& e : events) body += to_json(e).dump() + "\n";
                if (events.empty()) body += json{{"type", "heartbeat"}, {"last_seq", core.events().last_seq()}}.dump() + "\n";
                res.set_content(body, "application/x-ndjson");
                return;
            }
            auto cursor = std::make_shared<std::uint64_t>(since);
            res.set_chunked_content_provider(
                "application/x-ndjson", [this, cursor](std::size_t, httplib::DataSink& sink) {
                    if (stopping) return false;
                    const auto events =
                        core.events().since(*cursor, options.max_events_per_chunk, options.heartbeat);
                    std::string chunk;
                    for (const auto& e : events) {
                        chunk += to_json(e).dump() + "\n";
                        *cursor = e.seq;
                    }
                    if (events.empty()) {
                        if (core.events().closed() || stopping) return false;
                        chunk = json{{"type", "heartbeat"}, {"last_seq", *cursor}}.dump() + "\n";
                    }
                    return sink.write(chunk.data(), chunk.size());
                });
        });
    }
};

HttpServer::HttpServer(ServiceCore& core, HttpOptions options) : impl_(std::make_unique<Impl>(core, options)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop()
{
    impl_->stopping = true;
    impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace bamcbr::service
