#include "bamsim/link.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <utility>

namespace bamsim {

std::string_view to_string(BamModel model)
{
    switch (model) {
    case BamModel::mam: return "MAM";
    case BamModel::rdm: return "RDM";
    case BamModel::atcs: return "ATCS";
    }
    return "?";
}

std::optional<BamModel> parse_model(std::string_view text)
{
    std::string upper(text);
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (upper == "MAM") return BamModel::mam;
    if (upper == "RDM") return BamModel::rdm;
    if (upper == "ATCS") return BamModel::atcs;
    return std::nullopt;
}

std::string_view to_string(AdmissionOutcome outcome)
{
    switch (outcome) {
    case AdmissionOutcome::admitted: return "admitted";
    case AdmissionOutcome::admitted_borrowed: return "borrowed";
    case AdmissionOutcome::admitted_with_preemption: return "preemption";
    case AdmissionOutcome::admitted_with_devolution: return "devolution";
    case AdmissionOutcome::blocked: return "blocked";
    }
    return "?";
}

double LinkConfig::pool(int c) const
{
    const double upper = bc_rdm.at(static_cast<std::size_t>(c));
    const double lower = c + 1 < num_classes ? bc_rdm.at(static_cast<std::size_t>(c + 1)) : 0.0;
    return upper - lower;
}

std::vector<std::string> validate_config(const LinkConfig& cfg)
{
    std::vector<std::string> errors;
    if (!(cfg.capacity > 0) || !std::isfinite(cfg.capacity)) errors.emplace_back("capacity must be positive");
    if (cfg.num_classes <= 0) {
        errors.emplace_back("classes must be positive");
        return errors;
    }
    const auto n = static_cast<std::size_t>(cfg.num_classes);
    if (cfg.bc_mam.size() != n) errors.emplace_back("bc_mam must have one entry per class");
    if (cfg.bc_rdm.size() != n) errors.emplace_back("bc_rdm must have one entry per class");

    for (std::size_t c = 0; c < cfg.bc_mam.size(); ++c) {
        if (!(cfg.bc_mam[c] >= 0)) errors.push_back("bc_mam[" + std::to_string(c) + "] must be non-negative");
        if (cfg.bc_mam[c] > cfg.capacity) {
            errors.push_back("bc_mam[" + std::to_string(c) + "] must not exceed capacity");
        }
    }
    if (!cfg.bc_rdm.empty() && cfg.bc_rdm[0] != cfg.capacity) errors.emplace_back("bc_rdm[0] must equal capacity");
    for (std::size_t c = 0; c < cfg.bc_rdm.size(); ++c) {
        if (!(cfg.bc_rdm[c] >= 0)) errors.push_back("bc_rdm[" + std::to_string(c) + "] must be non-negative");
        if (c > 0 && cfg.bc_rdm[c] > cfg.bc_rdm[c - 1]) {
            errors.push_back("bc_rdm must be non-increasing (bc_rdm[" + std::to_string(c) + "] > bc_rdm[" +
                             std::to_string(c - 1) + "])");
        }
    }
    return errors;
}

Link::Link(LinkConfig cfg, BamModel model) : cfg_(std::move(cfg)), model_(model)
{
    auto errors = validate_config(cfg_);
    if (!errors.empty()) throw ConfigError(errors.front());
}

bool Link::is_active(LspId id) const
{
    return std::any_of(lsps_.begin(), lsps_.end(), [id](const ActiveLsp& l) { return l.id == id; });
}

std::vector<double> Link::allocated() const
{
    std::vector<double> out(static_cast<std::size_t>(cfg_.num_classes), 0.0);
    for (const auto& l : lsps_) out[static_cast<std::size_t>(l.cls)] += l.demand;
    return out;
}

std::vector<double> Link::native_allocated() const
{
    std::vector<double> out(static_cast<std::size_t>(cfg_.num_classes), 0.0);
    for (const auto& l : lsps_) {
        if (!l.borrowed) out[static_cast<std::size_t>(l.cls)] += l.demand;
    }
    return out;
}

std::vector<double> Link::lent_per_pool() const
{
    std::vector<double> out(static_cast<std::size_t>(cfg_.num_classes), 0.0);
    for (const auto& l : lsps_) {
        if (!l.borrowed) continue;
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += l.lent[c];
    }
    return out;
}

double Link::total_allocated() const
{
    double total = 0;
    for (const auto& l : lsps_) total += l.demand;
    return total;
}

void Link::add(const LspRequest& req, bool borrowed, std::vector<double> lent)
{
    if (lent.empty()) lent.assign(static_cast<std::size_t>(cfg_.num_classes), 0.0);
    lsps_.push_back({req.id, req.cls, req.demand, borrowed, std::move(lent), next_seq_++});
}

void Link::remove(LspId id)
{
    auto it = std::find_if(lsps_.begin(), lsps_.end(), [id](const ActiveLsp& l) { return l.id == id; });
    lsps_.erase(it);
}

void Link::release(LspId id)
{
    if (!is_active(id)) throw ConfigError("unknown LSP id " + std::to_string(id));
    remove(id);
}

AdmissionResult Link::admit(const LspRequest& req)
{
    if (req.cls < 0 || req.cls >= cfg_.num_classes) {
        throw ConfigError("unknown class index " + std::to_string(req.cls));
    }
    if (!(req.demand > 0)) throw ConfigError("LSP demand must be positive");
    if (is_active(req.id)) throw ConfigError("LSP id " + std::to_string(req.id) + " already active");

    switch (model_) {
    case BamModel::mam: return admit_mam(req);
    case BamModel::rdm: return admit_rdm(req);
    case BamModel::atcs: return admit_atcs(req);
    }
    return {};
}

AdmissionResult Link::admit_mam(const LspRequest& req)
{
    const auto p = static_cast<std::size_t>(req.cls);
    const auto alloc = allocated();
    if (alloc[p] + req.demand <= cfg_.bc_mam[p] + eps() && total_allocated() + req.demand <= cfg_.capacity + eps()) {
        add(req, false, {});
        return {AdmissionOutcome::admitted, {}, {}};
    }
    return {AdmissionOutcome::blocked, {}, {}};
}

namespace {

// Preemption / devolution victim order: lowest class, largest demand, most recent.
bool victim_before(const ActiveLsp& a, const ActiveLsp& b)
{
    if (a.cls != b.cls) return a.cls < b.cls;
    if (a.demand != b.demand) return a.demand > b.demand;
    return a.seq > b.seq;
}

}  // namespace

AdmissionResult Link::admit_rdm(const LspRequest& req)
{
    const int p = req.cls;
    const double d = req.demand;
    auto alloc = allocated();

    auto nested_sum = [&](int c) {
        double s = 0;
        for (int q = c; q < cfg_.num_classes; ++q) s += alloc[static_cast<std::size_t>(q)];
        return s;
    };
    auto highest_violated = [&]() -> int {
        for (int c = p; c >= 0; --c) {
            if (nested_sum(c) + d > cfg_.bc_rdm[static_cast<std::size_t>(c)] + eps()) return c;
        }
        return -1;
    };

    if (highest_violated() < 0) {
        add(req, false, {});
        return {AdmissionOutcome::admitted, {}, {}};
    }

    // Only allocations of classes >= p survive every possible preemption.
    const double floor_sum = nested_sum(p);
    for (int c = 0; c <= p; ++c) {
        if (floor_sum + d > cfg_.bc_rdm[static_cast<std::size_t>(c)] + eps()) return {AdmissionOutcome::blocked, {}, {}};
    }

    std::vector<const ActiveLsp*> candidates;
    for (const auto& l : lsps_) {
        if (l.cls < p) candidates.push_back(&l);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const ActiveLsp* a, const ActiveLsp* b) { return victim_before(*a, *b); });

    std::vector<LspId> victims;
    for (int c = highest_violated(); c >= 0; c = highest_violated()) {
        // Victims must sit in classes [c, p) to relieve constraint c.
        auto it = std::find_if(candidates.begin(), candidates.end(),
                               [c](const ActiveLsp* l) { return l && l->cls >= c; });
        if (it == candidates.end()) return {AdmissionOutcome::blocked, {}, {}};
        alloc[static_cast<std::size_t>((*it)->cls)] -= (*it)->demand;
        victims.push_back((*it)->id);
        *it = nullptr;
    }

    for (auto id : victims) remove(id);
    preemptions_ += victims.size();
    add(req, false, {});
    return {AdmissionOutcome::admitted_with_preemption, std::move(victims), {}};
}

AdmissionResult Link::admit_atcs(const LspRequest& req)
{
    const int n = cfg_.num_classes;
    const auto p = static_cast<std::size_t>(req.cls);
    const double d = req.demand;
    const auto native = native_allocated();
    const auto lent = lent_per_pool();
    const double total = total_allocated();

    if (native[p] + d <= cfg_.pool(req.cls) + eps()) {
        double free_in_pool = cfg_.pool(req.cls) - native[p] - lent[p];
        double free_on_link = cfg_.capacity - total;

        std::vector<const ActiveLsp*> borrowers;
        for (const auto& l : lsps_) {
            if (l.borrowed) borrowers.push_back(&l);
        }
        std::sort(borrowers.begin(), borrowers.end(),
                  [](const ActiveLsp* a, const ActiveLsp* b) { return victim_before(*a, *b); });

        std::vector<LspId> devolved;
        auto devolve = [&](std::vector<const ActiveLsp*>::iterator it) {
            free_in_pool += (*it)->lent[p];
            free_on_link += (*it)->demand;
            devolved.push_back((*it)->id);
            *it = nullptr;
        };
        // First reclaim the requesting class's own pool, then the link.
        for (auto it = borrowers.begin(); it != borrowers.end() && free_in_pool + eps() < d; ++it) {
            if (*it && (*it)->lent[p] > 0) devolve(it);
        }
        for (auto it = borrowers.begin(); it != borrowers.end() && free_on_link + eps() < d; ++it) {
            if (*it) devolve(it);
        }

        if (free_in_pool + eps() >= d && free_on_link + eps() >= d) {
            for (auto id : devolved) remove(id);
            devolutions_ += devolved.size();
            add(req, false, {});
            const auto outcome =
                devolved.empty() ? AdmissionOutcome::admitted : AdmissionOutcome::admitted_with_devolution;
            return {outcome, {}, std::move(devolved)};
        }
    }

    // Borrow idle bandwidth from higher-priority pools, nearest first.
    if (req.cls + 1 >= n || total + d > cfg_.capacity + eps()) return {AdmissionOutcome::blocked, {}, {}};
    std::vector<double> share(static_cast<std::size_t>(n), 0.0);
    double remaining = d;
    std::size_t last = p + 1;
    for (auto c = p + 1; c < static_cast<std::size_t>(n) && remaining > 0; ++c) {
        const double idle = std::max(0.0, cfg_.pool(static_cast<int>(c)) - native[c] - lent[c]);
        if (idle <= 0) continue;
        const double take = std::min(idle, remaining);
        share[c] = take;
        remaining -= take;
        last = c;
    }
    if (remaining > eps()) return {AdmissionOutcome::blocked, {}, {}};
    share[last] += remaining;  // rounding residue

    add(req, true, std::move(share));
    return {AdmissionOutcome::admitted_borrowed, {}, {}};
}

SwitchReport Link::switch_model(BamModel to)
{
    SwitchReport report{model_, to, {}};
    if (to == model_) return report;

    if (model_ == BamModel::atcs) {
        std::vector<const ActiveLsp*> borrowers;
        for (const auto& l : lsps_) {
            if (l.borrowed) borrowers.push_back(&l);
        }
        std::sort(borrowers.begin(), borrowers.end(),
                  [](const ActiveLsp* a, const ActiveLsp* b) { return victim_before(*a, *b); });
        for (const auto* l : borrowers) report.devolved.push_back(l->id);
        for (auto id : report.devolved) remove(id);
        devolutions_ += report.devolved.size();
    }
    model_ = to;
    return report;
}

std::vector<std::string> Link::check_invariants() const
{
    std::vector<std::string> out;
    const double tol = eps() * 10;
    const auto alloc = allocated();
    const auto native = native_allocated();
    const auto lent = lent_per_pool();

    if (total_allocated() > cfg_.capacity + tol) out.emplace_back("total allocation exceeds capacity");

    auto nested = [&](const std::vector<double>& a, const char* what) {
        for (int c = 0; c < cfg_.num_classes; ++c) {
            double s = 0;
            for (int q = c; q < cfg_.num_classes; ++q) s += a[static_cast<std::size_t>(q)];
            if (s > cfg_.bc_rdm[static_cast<std::size_t>(c)] + tol) {
                out.push_back(std::string(what) + " nested bound bc_rdm[" + std::to_string(c) + "] exceeded");
            }
        }
    };

    switch (model_) {
    case BamModel::mam:
        for (int c = 0; c < cfg_.num_classes; ++c) {
            if (alloc[static_cast<std::size_t>(c)] > cfg_.bc_mam[static_cast<std::size_t>(c)] + tol) {
                out.push_back("MAM bound bc_mam[" + std::to_string(c) + "] exceeded");
            }
        }
        break;
    case BamModel::rdm: nested(alloc, "RDM"); break;
    case BamModel::atcs:
        nested(native, "ATCS native");
        for (int c = 0; c < cfg_.num_classes; ++c) {
            const auto i = static_cast<std::size_t>(c);
            if (native[i] + lent[i] > cfg_.pool(c) + tol) {
                out.push_back("ATCS pool " + std::to_string(c) + " over-committed");
            }
        }
        break;
    }

    for (const auto& l : lsps_) {
        if (l.borrowed && model_ != BamModel::atcs) {
            out.push_back("LSP " + std::to_string(l.id) + " borrowed outside ATCS");
        }
        const double share = std::accumulate(l.lent.begin(), l.lent.end(), 0.0);
        if (l.borrowed) {
            if (std::abs(share - l.demand) > tol) out.push_back("LSP " + std::to_string(l.id) + " lent share mismatch");
            for (int c = 0; c <= l.cls; ++c) {
                if (l.lent[static_cast<std::size_t>(c)] != 0) {
                    out.push_back("LSP " + std::to_string(l.id) + " borrows from a non-higher pool");
                }
            }
        } else if (share != 0) {
            out.push_back("native LSP " + std::to_string(l.id) + " carries a lent share");
        }
    }
    return out;
}

}  // namespace bamsim
