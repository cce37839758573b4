#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bamsim {

using SimTime = double;
using LspId = std::uint64_t;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class BamModel { mam, rdm, atcs };

inline constexpr BamModel kAllModels[] = {BamModel::mam, BamModel::rdm, BamModel::atcs};

// "MAM", "RDM", "ATCS".
std::string_view to_string(BamModel model);
// Case-insensitive.
std::optional<BamModel> parse_model(std::string_view text);

// Class index p in [0, N-1]; a higher index is a higher priority.
struct LinkConfig {
    double capacity = 100.0;
    int num_classes = 3;
    std::vector<double> bc_mam{40.0, 30.0, 30.0};
    // Nested family: bc_rdm[c] bounds the total of classes c..N-1.
    std::vector<double> bc_rdm{100.0, 60.0, 30.0};

    // Private pool of class c under ATCS: bc_rdm[c] - bc_rdm[c+1].
    double pool(int c) const;
};

// Every violated rule, one message each. Empty means valid.
std::vector<std::string> validate_config(const LinkConfig& cfg);

struct LspRequest {
    LspId id = 0;
    int cls = 0;
    double demand = 0.0;
    SimTime arrival = 0.0;
    SimTime holding = 0.0;
};

struct ActiveLsp {
    LspId id = 0;
    int cls = 0;
    double demand = 0.0;
    bool borrowed = false;
    // Per-pool share of a borrowed LSP (size N, zero for natives).
    std::vector<double> lent;
    std::uint64_t seq = 0;  // admission order
};

enum class AdmissionOutcome { admitted, admitted_borrowed, admitted_with_preemption, admitted_with_devolution, blocked };

std::string_view to_string(AdmissionOutcome outcome);

struct AdmissionResult {
    AdmissionOutcome outcome = AdmissionOutcome::blocked;
    std::vector<LspId> preempted;
    std::vector<LspId> devolved;

    bool admitted() const { return outcome != AdmissionOutcome::blocked; }
};

struct SwitchReport {
    BamModel from = BamModel::mam;
    BamModel to = BamModel::mam;
    std::vector<LspId> devolved;
};

// One MPLS/DS-TE link under a bandwidth allocation model.
//
//   MAM   alloc[p] + d <= bc_mam[p] and total + d <= capacity. No sharing.
//   RDM   for every c <= p: sum_{q >= c} alloc[q] + d <= bc_rdm[c]. When only
//         lower-priority allocations stand in the way, those LSPs are
//         preempted: lowest class, then largest demand, then most recent.
//   ATCS  pools pool[c] = bc_rdm[c] - bc_rdm[c+1]. A request that fits its
//         own pool is native; borrowers sitting in that pool are devolved
//         (lowest class, largest, most recent first) to make room. Otherwise
//         it may borrow idle bandwidth from higher-priority pools, nearest
//         pool first. Natives never exceed their pool, so no preemption.
//
// Every outcome is applied atomically; Blocked leaves the state untouched.
class Link {
public:
    Link(LinkConfig cfg, BamModel model);

    // Throws ConfigError for an unknown class index or non-positive demand.
    AdmissionResult admit(const LspRequest& req);
    // Throws ConfigError for an unknown id.
    void release(LspId id);
    SwitchReport switch_model(BamModel to);

    bool is_active(LspId id) const;
    const LinkConfig& config() const { return cfg_; }
    BamModel model() const { return model_; }
    const std::vector<ActiveLsp>& active() const { return lsps_; }

    // Per-class allocation including borrowed LSPs.
    std::vector<double> allocated() const;
    std::vector<double> native_allocated() const;
    // Borrowed bandwidth sitting in each pool.
    std::vector<double> lent_per_pool() const;
    double total_allocated() const;

    std::uint64_t preemptions() const { return preemptions_; }
    std::uint64_t devolutions() const { return devolutions_; }

    // Model-specific capacity rules that must hold after every event.
    // Returns one message per violation. LSPs admitted under an earlier
    // model are kept on a switch, so the new model's bounds may be exceeded
    // until they depart.
    std::vector<std::string> check_invariants() const;

private:
    AdmissionResult admit_mam(const LspRequest& req);
    AdmissionResult admit_rdm(const LspRequest& req);
    AdmissionResult admit_atcs(const LspRequest& req);

    void add(const LspRequest& req, bool borrowed, std::vector<double> lent);
    void remove(LspId id);
    double eps() const { return 1e-9 * cfg_.capacity; }

    LinkConfig cfg_;
    BamModel model_;
    std::vector<ActiveLsp> lsps_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t preemptions_ = 0;
    std::uint64_t devolutions_ = 0;
};

}  // namespace bamsim
