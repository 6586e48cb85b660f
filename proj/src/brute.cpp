#include "texp/brute.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <limits>

namespace texp {

std::vector<int> classify_grid(const TreeEnsemble& te, const IntervalTable& table,
                               std::uint64_t box_cap) {
    std::uint64_t total = 1;
    for (int i = 0; i < table.num_features(); ++i) {
        total *= static_cast<std::uint64_t>(table.num_intervals(i));
        if (total > box_cap) throw CapExceeded("classify_grid: too many boxes");
    }
    int m = table.num_features();
    std::vector<int> box(m, 1);
    std::vector<double> point(m);
    std::vector<int> labels;
    labels.reserve(total);
    for (std::uint64_t n = 0; n < total; ++n) {
        for (int i = 0; i < m; ++i)
            point[i] = 0.5 * (table.interval_lo(i, box[i]) + table.interval_hi(i, box[i]));
        labels.push_back(predict(te, point));
        for (int i = m - 1; i >= 0; --i) {
            if (box[i] < table.num_intervals(i)) {
                ++box[i];
                break;
            }
            box[i] = 1;
        }
    }
    return labels;
}

BruteOracle::BruteOracle(const ExplanationProblem& problem, std::uint64_t box_cap)
    : p_(&problem) {
    const IntervalTable& table = *p_->table;
    labels_ = classify_grid(*p_->te, table, box_cap);
    for (int i = 0; i < table.num_features(); ++i) {
        radices_.push_back(table.num_intervals(i));
        num_boxes_ *= static_cast<std::uint64_t>(radices_.back());
    }
    int m = table.num_features();

    // prefix counts of adversarial boxes over the (N_i + 1)-sized lattice
    prefix_stride_.assign(m, 1);
    for (int i = m - 2; i >= 0; --i)
        prefix_stride_[i] =
            prefix_stride_[i + 1] * static_cast<std::uint64_t>(radices_[i + 1] + 1);
    std::uint64_t lattice = prefix_stride_[0] * static_cast<std::uint64_t>(radices_[0] + 1);
    prefix_.assign(lattice, 0);

    std::vector<int> box(m, 1);
    for (std::uint64_t n = 0; n < num_boxes_; ++n) {
        if (labels_[n] != p_->target()) {
            std::uint64_t at = 0;
            for (int i = 0; i < m; ++i)
                at += prefix_stride_[i] * static_cast<std::uint64_t>(box[i]);
            ++prefix_[at];
        }
        for (int i = m - 1; i >= 0; --i) {
            if (box[i] < radices_[i]) {
                ++box[i];
                break;
            }
            box[i] = 1;
        }
    }
    for (int i = 0; i < m; ++i) {
        // accumulate along axis i
        std::uint64_t stride = prefix_stride_[i];
        for (std::uint64_t at = 0; at < lattice; ++at) {
            std::uint64_t c = (at / stride) % static_cast<std::uint64_t>(radices_[i] + 1);
            if (c > 0) prefix_[at] += prefix_[at - stride];
        }
    }
}

int BruteOracle::box_label(std::span<const int> box) const {
    std::uint64_t at = 0, stride = 1;
    for (int i = static_cast<int>(box.size()) - 1; i >= 0; --i) {
        at += stride * static_cast<std::uint64_t>(box[i] - 1);
        stride *= static_cast<std::uint64_t>(radices_[i]);
    }
    return labels_[at];
}

std::vector<double> BruteOracle::box_midpoint(std::span<const int> box) const {
    std::vector<double> point(box.size());
    for (std::size_t i = 0; i < box.size(); ++i)
        point[i] = 0.5 * (p_->table->interval_lo(static_cast<int>(i), box[i]) +
                          p_->table->interval_hi(static_cast<int>(i), box[i]));
    return point;
}

bool BruteOracle::kappa_constant() const {
    return std::adjacent_find(labels_.begin(), labels_.end(),
                              std::not_equal_to<int>()) == labels_.end();
}

std::uint64_t BruteOracle::adversarial_in(const Region& region) const {
    int m = static_cast<int>(radices_.size());
    std::uint64_t count = 0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::uint64_t at = 0;
        bool empty = false;
        for (int i = 0; i < m; ++i) {
            int c = (mask >> i) & 1u ? region.ranges[i].lo - 1 : region.ranges[i].hi;
            if (c < 0) {
                empty = true;
                break;
            }
            at += prefix_stride_[i] * static_cast<std::uint64_t>(c);
        }
        if (empty) continue;
        if (__builtin_popcount(mask) % 2 == 0)
            count += prefix_[at];
        else
            count -= prefix_[at];
    }
    return count;
}

bool BruteOracle::is_weak_iaxp(const Region& region) const {
    return adversarial_in(region) == 0;
}

bool BruteOracle::region_enum(std::uint64_t cap,
                              const std::function<void(const Region&)>& fn) const {
    int m = static_cast<int>(radices_.size());
    std::uint64_t total = 1;
    for (int i = 0; i < m; ++i) {
        int e = p_->inst_box[i];
        total *= static_cast<std::uint64_t>(e) *
                 static_cast<std::uint64_t>(radices_[i] - e + 1);
        if (total > cap) throw CapExceeded("brute: too many candidate regions");
    }
    Region region;
    region.ranges.resize(m);
    std::function<void(int)> rec = [&](int i) {
        if (i == m) {
            fn(region);
            return;
        }
        int e = p_->inst_box[i];
        for (int lo = 1; lo <= e; ++lo)
            for (int hi = e; hi <= radices_[i]; ++hi) {
                region.ranges[i] = IdxRange{lo, hi};
                rec(i + 1);
            }
    };
    rec(0);
    return true;
}

std::pair<Region, double> BruteOracle::max_iaxp(std::uint64_t region_cap) const {
    Region best;
    double best_fsc = -std::numeric_limits<double>::infinity();
    region_enum(region_cap, [&](const Region& region) {
        if (adversarial_in(region) != 0) return;
        double f = fsc(region, *p_->table, *p_->measure);
        if (f > best_fsc) {
            best_fsc = f;
            best = region;
        }
    });
    assert(std::isfinite(best_fsc));  // the instance's own box is always valid
    return {best, best_fsc};
}

BruteOracle::ExplanationSets BruteOracle::enumerate_explanations(
    std::uint64_t region_cap) const {
    ExplanationSets sets;
    int m = static_cast<int>(radices_.size());
    region_enum(region_cap, [&](const Region& region) {
        if (adversarial_in(region) != 0) return;
        for (int i = 0; i < m; ++i) {
            if (region.ranges[i].lo > 1) {
                Region ext = region;
                --ext.ranges[i].lo;
                if (adversarial_in(ext) == 0) return;  // extensible
            }
            if (region.ranges[i].hi < radices_[i]) {
                Region ext = region;
                ++ext.ranges[i].hi;
                if (adversarial_in(ext) == 0) return;
            }
        }
        sets.iaxps.push_back(region);
    });

    // shrink-minimal adversarial boxes: flipping any subset of the deviating
    // features back to the instance's interval must restore the prediction
    std::vector<int> box(m, 1);
    for (std::uint64_t n = 0; n < num_boxes_; ++n) {
        if (labels_[n] != p_->target()) {
            std::vector<int> deviating;
            for (int i = 0; i < m; ++i)
                if (box[i] != p_->inst_box[i]) deviating.push_back(i);
            assert(!deviating.empty());
            bool minimal = true;
            std::vector<int> probe(box);
            for (unsigned mask = 1; minimal && mask + 1 < (1u << deviating.size());
                 ++mask) {
                for (std::size_t d = 0; d < deviating.size(); ++d)
                    probe[deviating[d]] =
                        (mask >> d) & 1u ? p_->inst_box[deviating[d]] : box[deviating[d]];
                if (box_label(probe) != p_->target()) minimal = false;
            }
            if (minimal) {
                Icxp icxp;
                icxp.features = deviating;
                for (int i = 0; i < m; ++i) icxp.box.push_back(IdxRange{box[i], box[i]});
                sets.icxps.push_back(std::move(icxp));
            }
        }
        for (int i = m - 1; i >= 0; --i) {
            if (box[i] < radices_[i]) {
                ++box[i];
                break;
            }
            box[i] = 1;
        }
    }
    return sets;
}

std::optional<Cost> maxsat_brute(const Wcnf& formula, int max_vars) {
    if (formula.num_vars > max_vars)
        throw CapExceeded("maxsat_brute: too many variables");
    std::optional<Cost> best;
    for (std::uint64_t bits = 0; bits < (1ull << formula.num_vars); ++bits) {
        auto lit_true = [&](sat::Lit l) {
            bool v = (bits >> l.var()) & 1ull;
            return l.sign() ? !v : v;
        };
        auto satisfied = [&](const std::vector<sat::Lit>& cl) {
            for (sat::Lit l : cl)
                if (lit_true(l)) return true;
            return false;
        };
        bool ok = true;
        for (const auto& cl : formula.hard)
            if (!satisfied(cl)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        Cost cost;
        for (const SoftClause& s : formula.soft)
            if (!satisfied(s.lits)) cost += s.cost;
        if (!best || cost < *best) best = cost;
    }
    return best;
}

}  // namespace texp
