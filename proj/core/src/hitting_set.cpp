#include "dynshort/hitting_set.hpp"

#include <algorithm>
#include <cmath>

#include "dynshort/errors.hpp"

namespace dynshort {

namespace detail {

void GreedyCover::add_set(std::vector<int> members) {
    if (stage_ != Stage::setup) {
        throw DimensionError("GreedyCover: all sets must be added before work starts");
    }
    covered_.push_back(false);
    ++uncovered_;
    sets_.push_back(std::move(members));
}

void GreedyCover::advance(long touches) {
    while (touches-- > 0 && stage_ != Stage::done) one_touch();
}

void GreedyCover::finish() {
    while (stage_ != Stage::done) advance(1L << 20);
}

void GreedyCover::one_touch() {
    switch (stage_) {
        case Stage::setup: {
            if (setup_set_ == sets_.size()) {
                stage_ = Stage::fill;
                return;
            }
            const auto& s = sets_[setup_set_];
            if (setup_pos_ == s.size()) {
                setup_pos_ = 0;
                ++setup_set_;
                return;
            }
            int w = s[setup_pos_++];
            covers_[static_cast<size_t>(w)].push_back(setup_set_);
            ++count_[static_cast<size_t>(w)];
            return;
        }
        case Stage::fill: {
            if (fill_node_ == count_.size()) {
                stage_ = Stage::pick;
                return;
            }
            size_t w = fill_node_++;
            int c = count_[w];
            if (c > 0) {
                if (static_cast<size_t>(c) >= buckets_.size()) {
                    buckets_.resize(static_cast<size_t>(c) + 1);
                }
                buckets_[static_cast<size_t>(c)].insert(static_cast<int>(w));
                cur_max_ = std::max(cur_max_, c);
            }
            return;
        }
        case Stage::pick: {
            if (uncovered_ == 0) {
                stage_ = Stage::done;
                return;
            }
            if (drain_set_ >= 0) {
                // Decrement one member of the set just covered.
                const auto& s = sets_[static_cast<size_t>(drain_set_)];
                if (drain_pos_ == s.size()) {
                    drain_set_ = -1;
                    return;
                }
                size_t x = static_cast<size_t>(s[drain_pos_++]);
                if (count_[x] > 0) {  // zero means x was already picked
                    size_t present =
                        buckets_[static_cast<size_t>(count_[x])].erase(static_cast<int>(x));
                    --count_[x];
                    if (present != 0 && count_[x] > 0) {
                        buckets_[static_cast<size_t>(count_[x])].insert(static_cast<int>(x));
                    }
                }
                return;
            }
            if (!drain_queue_.empty()) {
                size_t si = drain_queue_.front();
                drain_queue_.pop_front();
                if (!covered_[si]) {
                    covered_[si] = true;
                    --uncovered_;
                    drain_set_ = static_cast<long>(si);
                    drain_pos_ = 0;
                }
                return;
            }
            if (cur_max_ == 0) {
                // Unreachable while sets remain uncovered: every uncovered
                // set keeps all its members bucketed with positive count.
                stage_ = Stage::done;
                return;
            }
            if (buckets_[static_cast<size_t>(cur_max_)].empty()) {
                --cur_max_;
                return;
            }
            auto& top = buckets_[static_cast<size_t>(cur_max_)];
            int w = *top.begin();
            top.erase(top.begin());
            picks_.push_back(w);
            count_[static_cast<size_t>(w)] = 0;
            for (size_t si : covers_[static_cast<size_t>(w)]) drain_queue_.push_back(si);
            return;
        }
        case Stage::done:
            return;
    }
}

}  // namespace detail

std::vector<int> static_greedy_hitting_set(const DynGraph& g, int d) {
    if (d < 1) throw DimensionError("hitting set: degree threshold must be positive");
    detail::GreedyCover cover(g.n());
    for (int v = 0; v < g.n(); ++v) {
        if (g.degree(v) < d) continue;
        const auto& nb = g.neighbors(v);
        cover.add_set(std::vector<int>(nb.begin(), nb.begin() + d));
    }
    cover.finish();
    std::vector<int> picks = cover.picks();
    std::sort(picks.begin(), picks.end());
    return picks;
}

HittingSet::HittingSet(DynGraph g, int d) : g_(std::move(g)), d_(d), greedy_(0) {
    if (d_ < 1) throw DimensionError("hitting set: degree threshold must be positive");
    const int n = g_.n();
    // Phase length: enough updates that the per-update work slices stay small,
    // rounded up to a multiple of 5 so the subphases split evenly.
    const double t_raw = std::ceil(4.0 * n / d_ * std::log(n + 2.0));
    degenerate_ = static_cast<long>(d_) * d_ > n || t_raw < 5.0;
    auto seed = static_greedy_hitting_set(g_, d_);
    a_old_.insert(seed.begin(), seed.end());
    out_ = a_old_;
    if (degenerate_) return;
    len_ = static_cast<int>(std::ceil(t_raw / 5.0));
    snap_per_tick_ = (n + len_ - 1) / len_;
    // Four primitive touches per budgeted step: the n*d coverage decrements
    // dominate, with setup, bucket fill, and bucket descents as overhead.
    greedy_per_tick_ = 4 * ((static_cast<long>(n) * d_ + len_ - 1) / len_);
    start_phase();
}

void HittingSet::start_phase() {
    tick_ = 0;
    snap_cursor_ = 0;
    greedy_ = detail::GreedyCover(g_.n());
    touched_.clear();
    report_list_.clear();
    report_cursor_ = 0;
    report_per_tick_ = 0;
    retire_list_.clear();
    retire_cursor_ = 0;
    retire_per_tick_ = 0;
}

void HittingSet::report_add(int v, std::vector<SetChange>& log) {
    if (out_.insert(v).second) log.push_back({true, v});
}

void HittingSet::fix(std::set<int>& gen, int v, std::vector<SetChange>& log) {
    if (g_.degree(v) < d_) return;
    const auto& nb = g_.neighbors(v);
    for (int i = 0; i < d_; ++i) {
        if (gen.count(nb[static_cast<size_t>(i)]) > 0) return;
    }
    int w = nb[0];  // smallest-id neighbor
    gen.insert(w);
    report_add(w, log);
}

void HittingSet::snapshot_some() {
    for (int k = 0; k < snap_per_tick_ && snap_cursor_ < g_.n(); ++k, ++snap_cursor_) {
        int v = snap_cursor_;
        if (g_.degree(v) < d_) continue;
        const auto& nb = g_.neighbors(v);
        greedy_.add_set(std::vector<int>(nb.begin(), nb.begin() + d_));
    }
}

std::vector<SetChange> HittingSet::degenerate_update() {
    auto fresh = static_greedy_hitting_set(g_, d_);
    std::set<int> next(fresh.begin(), fresh.end());
    std::vector<SetChange> log;
    for (int w : next) {
        if (out_.count(w) == 0) log.push_back({true, w});
    }
    for (int w : out_) {
        if (next.count(w) == 0) log.push_back({false, w});
    }
    out_ = std::move(next);
    a_old_ = out_;
    a_new_.clear();
    return log;
}

std::vector<SetChange> HittingSet::update(EdgeOp op, int u, int v) {
    if (op == EdgeOp::insert) {
        g_.insert_edge(u, v);
    } else {
        g_.delete_edge(u, v);
    }
    if (degenerate_) return degenerate_update();

    std::vector<SetChange> log;
    const int sp = tick_ / len_ + 1;

    // Endpoints touched while the snapshot/greedy may be stale are queued for
    // a late re-check; both live generations are patched immediately.
    if (sp <= 3) {
        touched_.push_back(u);
        touched_.push_back(v);
    }
    if (sp <= 4) {
        fix(a_old_, u, log);
        fix(a_old_, v, log);
    }
    if (sp >= 4) {
        fix(a_new_, u, log);
        fix(a_new_, v, log);
    }

    switch (sp) {
        case 1:
            snapshot_some();
            break;
        case 2:
            greedy_.advance(greedy_per_tick_);
            if (tick_ == 2 * len_ - 1) {
                // Subphase boundary: the replacement set must be complete.
                greedy_.finish();
                for (int w : greedy_.picks()) a_new_.insert(w);
            }
            break;
        case 3: {
            if (tick_ == 2 * len_) {
                // a_new_ is static during this subphase, so a fixed quota
                // drains the whole report list by the boundary.
                report_list_.assign(a_new_.begin(), a_new_.end());
                report_per_tick_ =
                    static_cast<int>((report_list_.size() + len_ - 1) / len_);
            }
            for (int k = 0; k < report_per_tick_ && report_cursor_ < report_list_.size(); ++k) {
                report_add(report_list_[report_cursor_++], log);
            }
            break;
        }
        case 4:
            // |touched_| <= 6*len_, so six re-checks per update drain it.
            for (int k = 0; k < 6 && !touched_.empty(); ++k) {
                int x = touched_.front();
                touched_.pop_front();
                fix(a_new_, x, log);
            }
            break;
        case 5: {
            if (tick_ == 4 * len_) {
                // a_old_ only shrinks from here on (fixes go to a_new_), so a
                // fixed quota retires all of it by the phase boundary.
                retire_list_.assign(a_old_.begin(), a_old_.end());
                retire_per_tick_ =
                    static_cast<int>((retire_list_.size() + len_ - 1) / len_);
            }
            for (int k = 0; k < retire_per_tick_ && retire_cursor_ < retire_list_.size(); ++k) {
                int x = retire_list_[retire_cursor_++];
                a_old_.erase(x);
                if (a_new_.count(x) == 0 && out_.erase(x) > 0) {
                    log.push_back({false, x});
                }
            }
            break;
        }
        default:
            break;
    }

    ++tick_;
    if (tick_ == 5 * len_) {
        a_old_ = std::move(a_new_);
        a_new_.clear();
        start_phase();
    }
    return log;
}

}  // namespace dynshort
