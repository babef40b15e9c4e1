#include "heisbcp/family_search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

#include "heisbcp/parallel.hpp"
#include "json.hpp"
#include "json_num.hpp"
#include "rng.hpp"

namespace heis {

FamilyCheck verify_family(const DistanceOracle& o, const BesicovitchFamily& f, double slack) {
    if (f.balls.empty()) return {false, "family has no balls"};
    for (std::size_t i = 0; i < f.balls.size(); ++i) {
        if (!(f.balls[i].radius > 0.0))
            return {false, "ball " + std::to_string(i) + " has non-positive radius"};
        const double d = o.distance(f.balls[i].center, f.common_point);
        if (d > f.balls[i].radius + slack)
            return {false, "common point lies outside ball " + std::to_string(i) +
                               " (d = " + std::to_string(d) + ")"};
    }
    for (std::size_t i = 0; i < f.balls.size(); ++i) {
        for (std::size_t j = i + 1; j < f.balls.size(); ++j) {
            const double d = o.distance(f.balls[i].center, f.balls[j].center);
            if (d <= std::max(f.balls[i].radius, f.balls[j].radius) - slack)
                return {false, "center of one of balls " + std::to_string(i) + "," +
                                   std::to_string(j) + " lies in the other (d = " +
                                   std::to_string(d) + ")"};
        }
    }
    return {true, ""};
}

namespace {

class CountedOracle {
public:
    CountedOracle(const DistanceOracle& o, long long budget) : o_(o), left_(budget) {}
    bool exhausted() const { return left_ <= 0; }
    long long left() const { return left_; }
    long long used() const { return used_; }
    // returns NaN once the budget is spent
    double distance(GroupPoint a, GroupPoint b) {
        if (left_ <= 0) return std::numeric_limits<double>::quiet_NaN();
        --left_;
        ++used_;
        return o_.distance(a, b);
    }

private:
    const DistanceOracle& o_;
    long long left_;
    long long used_ = 0;
};

struct Candidate {
    GroupPoint unit;  // point on the unit sphere around 0
    double radius;
    GroupPoint center() const { return dilate(radius, unit); }
};

BesicovitchFamily to_family(const std::vector<Candidate>& members) {
    BesicovitchFamily f;
    f.common_point = GroupPoint();
    for (const auto& c : members) f.balls.push_back({c.center(), c.radius});
    return f;
}

struct ChainResult {
    std::vector<Candidate> best;
    std::vector<TracePoint> trace;  // chain-local evaluation counts
    long long used = 0;
};

// One search chain. Greedy: accept random candidate balls whenever the family
// property is preserved. Anneal: additionally try to grow past greedy
// saturation by admitting one violating ball and annealing pairwise violations
// down to zero, restarting from the best incumbent when a session fails.
class Chain {
public:
    Chain(const DistanceOracle& o, const SearchConfig& cfg, std::uint64_t seed, long long budget)
        : oracle_(o, budget), cfg_(cfg), rng_(seed), log_rmin_(std::log(cfg.r_min)),
          log_rmax_(std::log(cfg.r_max)) {}

    ChainResult run() {
        const bool anneal = cfg_.strategy == SearchConfig::Strategy::Anneal;
        int stale = 0;
        int failed_sessions = 0;
        while (!oracle_.exhausted()) {
            if (try_add_random()) {
                stale = 0;
                continue;
            }
            ++stale;
            if (anneal && stale >= 30 && members_.size() >= 2) {
                const std::size_t before = members_.size();
                grow_session();
                stale = 0;
                if (members_.size() > before) {
                    failed_sessions = 0;
                } else if (++failed_sessions >= 2) {
                    // the incumbent's structure is blocking growth: kick a few
                    // members out and let the refill explore something else
                    // (the best family so far stays snapshotted in the trace)
                    failed_sessions = 0;
                    for (int k = 0; k < 3 && members_.size() > 2; ++k)
                        drop_member(static_cast<std::size_t>(rng_.bits() % members_.size()));
                }
            }
        }
        if (result_.best.empty() && !members_.empty()) result_.best = members_;
        result_.used = oracle_.used();
        return result_;
    }

private:
    CountedOracle oracle_;
    const SearchConfig& cfg_;
    Rng rng_;
    double log_rmin_, log_rmax_;

    std::vector<Candidate> members_;
    std::vector<std::vector<double>> dist_;  // cached pairwise center distances
    ChainResult result_;
    int best_card_ = 0;

    // target margin: anneal to strictly better than the verifier's slack
    double margin() const { return 2.0 * cfg_.slack; }

    double viol(std::size_t i, std::size_t j) const {
        const double need = std::max(members_[i].radius, members_[j].radius) + margin();
        return std::max(0.0, need - dist_[i][j]);
    }

    double energy() const {
        double e = 0.0;
        for (std::size_t i = 0; i < members_.size(); ++i)
            for (std::size_t j = i + 1; j < members_.size(); ++j) e += viol(i, j);
        return e;
    }

    void note_progress() {
        if (static_cast<int>(members_.size()) > best_card_) {
            best_card_ = static_cast<int>(members_.size());
            result_.best = members_;
            result_.trace.push_back({oracle_.used(), best_card_});
        }
    }

    bool sample_candidate(Candidate& out) {
        // mixture: plain directions, vertical caps, and the equatorial rim
        const double mode = rng_.uniform();
        for (int tries = 0; tries < 8; ++tries) {
            GroupPoint raw;
            if (mode < 0.4) {
                raw = GroupPoint(rng_.normal(), rng_.normal(), rng_.normal());
            } else if (mode < 0.65) {
                raw = GroupPoint(rng_.normal(), rng_.normal(), 4.0 * rng_.normal());
            } else {
                const double th = 2.0 * M_PI * rng_.uniform();
                raw = GroupPoint(std::cos(th), std::sin(th), 0.15 * rng_.normal());
            }
            const double t = oracle_.distance(GroupPoint(), raw);
            if (std::isnan(t)) return false;
            if (t <= 1e-9) continue;
            double r = cfg_.r_max;
            if (rng_.uniform() > 0.5) r = std::exp(log_rmin_ + (log_rmax_ - log_rmin_) * rng_.uniform());
            out = {dilate(1.0 / t, raw), r};
            return true;
        }
        return false;
    }

    // distances from candidate c to all current members; false on budget end
    bool row_for(const Candidate& c, std::vector<double>& row) {
        row.resize(members_.size());
        for (std::size_t i = 0; i < members_.size(); ++i) {
            const double d = oracle_.distance(c.center(), members_[i].center());
            if (std::isnan(d)) return false;
            row[i] = d;
        }
        return true;
    }

    bool row_valid(const Candidate& c, const std::vector<double>& row) const {
        for (std::size_t i = 0; i < members_.size(); ++i)
            if (row[i] <= std::max(c.radius, members_[i].radius) + cfg_.slack) return false;
        return true;
    }

    void push_member(const Candidate& c, const std::vector<double>& row) {
        for (std::size_t i = 0; i < members_.size(); ++i) dist_[i].push_back(row[i]);
        members_.push_back(c);
        dist_.emplace_back(row);
        dist_.back().push_back(0.0);
    }

    void drop_member(std::size_t j) {
        members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(j));
        dist_.erase(dist_.begin() + static_cast<std::ptrdiff_t>(j));
        for (auto& r : dist_) r.erase(r.begin() + static_cast<std::ptrdiff_t>(j));
    }

    bool try_add_random() {
        Candidate c;
        if (!sample_candidate(c)) return false;
        std::vector<double> row;
        if (!row_for(c, row)) return false;
        if (!row_valid(c, row)) return false;
        push_member(c, row);
        note_progress();
        return true;
    }

    // Admit one violating ball, then anneal member perturbations against the
    // pairwise-violation energy; commit if it reaches zero, else roll back.
    void grow_session() {
        Candidate c;
        if (!sample_candidate(c)) return;
        if (rng_.uniform() < 0.8) c.radius = cfg_.r_max;  // grow at the dominant scale
        std::vector<double> row;
        if (!row_for(c, row)) return;
        const std::vector<Candidate> incumbent = members_;
        const std::vector<std::vector<double>> incumbent_dist = dist_;
        push_member(c, row);

        const std::size_t n = members_.size();
        double e = energy();
        const int moves = static_cast<int>(std::min<long long>(
            60 * n, std::max<long long>(50, oracle_.left() / (2 * static_cast<long long>(n)))));
        double temperature = std::max(0.02, 0.2 * e);
        const double cool = std::pow(1e-3, 1.0 / moves);
        double best_e = e;
        int since_improve = 0;
        const int patience = static_cast<int>(20 * n);
        for (int m = 0; m < moves && e > 0.0 && !oracle_.exhausted(); ++m, temperature *= cool) {
            if (e < best_e - 1e-15) {
                best_e = e;
                since_improve = 0;
            } else if (++since_improve > patience) {
                break;  // stalled: spend the budget on a fresh restart instead
            }
            // move the worst offender most of the time
            std::size_t j = 0;
            if (rng_.uniform() < 0.7) {
                double worst = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double vi = 0.0;
                    for (std::size_t k = 0; k < n; ++k)
                        if (k != i) vi += viol(i, k);
                    if (vi > worst) {
                        worst = vi;
                        j = i;
                    }
                }
            } else {
                j = static_cast<std::size_t>(rng_.bits() % n);
            }

            const double sigma = 0.02 + 0.3 * (temperature / 0.02);
            const Candidate old = members_[j];
            GroupPoint raw(old.unit.v.x + sigma * rng_.normal(), old.unit.v.y + sigma * rng_.normal(),
                           old.unit.z + sigma * rng_.normal());
            const double t = oracle_.distance(GroupPoint(), raw);
            if (std::isnan(t)) break;
            if (t <= 1e-9) continue;
            Candidate moved{dilate(1.0 / t, raw), old.radius};
            if (rng_.uniform() < 0.2)
                moved.radius = std::clamp(old.radius * std::exp(0.2 * rng_.normal()), cfg_.r_min,
                                          cfg_.r_max);

            double de = 0.0;
            std::vector<double> new_row(n, 0.0);
            bool ok = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == j) continue;
                const double d = oracle_.distance(moved.center(), members_[i].center());
                if (std::isnan(d)) {
                    ok = false;
                    break;
                }
                new_row[i] = d;
                const double need_old = std::max(old.radius, members_[i].radius) + margin();
                const double need_new = std::max(moved.radius, members_[i].radius) + margin();
                de += std::max(0.0, need_new - d) - std::max(0.0, need_old - dist_[j][i]);
            }
            if (!ok) break;
            if (de <= 0.0 || rng_.uniform() < std::exp(-de / temperature)) {
                members_[j] = moved;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == j) continue;
                    dist_[j][i] = new_row[i];
                    dist_[i][j] = new_row[i];
                }
                e += de;
                if (e < 1e-15) e = energy();  // re-derive against drift
            }
        }

        if (e <= 0.0 && !members_.empty()) {
            note_progress();
        } else {
            members_ = incumbent;
            dist_ = incumbent_dist;
        }
    }
};

ChainResult run_chain(const DistanceOracle& o, const SearchConfig& cfg, std::uint64_t chain_seed,
                      long long budget) {
    return Chain(o, cfg, chain_seed, budget).run();
}

}  // namespace

SearchResult search_family(const DistanceOracle& o, const SearchConfig& cfg) {
    if (!(cfg.r_min > 0.0) || !(cfg.r_max >= cfg.r_min))
        throw std::invalid_argument("search_family: invalid radius range");
    if (!(cfg.slack >= 10.0 * o.tol()))
        throw std::invalid_argument("search_family: slack must be >= 10x the oracle tolerance");
    if (cfg.budget < 0) throw std::invalid_argument("search_family: negative budget");

    SearchResult out;
    if (cfg.budget == 0) {
        // No evaluations allowed: a single ball containing the common point.
        out.family.common_point = GroupPoint();
        out.family.balls.push_back({GroupPoint(), cfg.r_max});
        out.trace.push_back({0, 1});
        return out;
    }

    // Fixed number of logical chains; the thread count never changes results.
    const int kChains = 2;
    std::vector<long long> slice(kChains, cfg.budget / kChains);
    slice[0] += cfg.budget % kChains;
    std::vector<ChainResult> chains(kChains);
    const int threads = std::min(kChains, worker_count());
    if (threads <= 1) {
        for (int c = 0; c < kChains; ++c)
            chains[c] = run_chain(o, cfg, cfg.seed * 0x9e3779b97f4a7c15ULL + c, slice[c]);
    } else {
        std::vector<std::future<ChainResult>> futs;
        for (int c = 0; c < kChains; ++c)
            futs.push_back(std::async(std::launch::async, [&, c] {
                return run_chain(o, cfg, cfg.seed * 0x9e3779b97f4a7c15ULL + c, slice[c]);
            }));
        for (int c = 0; c < kChains; ++c) chains[c] = futs[c].get();
    }

    // Deterministic merge: chain-local evaluation counts interleave round-robin
    // into a global clock; the merged trace is the running best.
    std::vector<std::pair<long long, int>> events;
    for (int c = 0; c < kChains; ++c) {
        for (const auto& tp : chains[c].trace)
            events.push_back({(tp.evaluations - 1) * kChains + c + 1, tp.best_cardinality});
        out.evaluations_used += chains[c].used;
    }
    std::sort(events.begin(), events.end());
    int running = 0;
    for (const auto& [t, card] : events) {
        if (card > running) {
            running = card;
            out.trace.push_back({t, card});
        }
    }

    int best_chain = 0;
    for (int c = 1; c < kChains; ++c)
        if (chains[c].best.size() > chains[best_chain].best.size()) best_chain = c;
    out.family = to_family(chains[best_chain].best);
    if (out.family.balls.empty()) {
        out.family.common_point = GroupPoint();
        out.family.balls.push_back({GroupPoint(), cfg.r_max});
        if (out.trace.empty()) out.trace.push_back({out.evaluations_used, 1});
    }
    return out;
}

BucketDecomposition scale_buckets(const std::vector<double>& radii, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("scale_buckets: eps must be in (0,1)");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (radii[i] < radii[i + 1])
            throw std::invalid_argument("scale_buckets: radii must be sorted descending");
    for (const double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("scale_buckets: radii must be positive");

    BucketDecomposition out;
    out.eps = eps;
    if (radii.empty()) return out;
    std::size_t leader = 0;
    while (leader < radii.size()) {
        std::size_t next = radii.size();
        for (std::size_t j = leader + 1; j < radii.size(); ++j) {
            if (radii[j] < eps * radii[leader]) {
                next = j;
                break;
            }
        }
        out.leaders.push_back(static_cast<int>(leader));
        std::vector<int> bucket;
        for (std::size_t j = leader; j < next; ++j) bucket.push_back(static_cast<int>(j));
        out.buckets.push_back(std::move(bucket));
        leader = next;
    }
    return out;
}

std::vector<GroupPoint> unit_ball_sample(const DistanceOracle& o, int count, std::uint64_t seed) {
    std::vector<GroupPoint> out;
    if (count <= 0) return out;
    out.reserve(static_cast<std::size_t>(count));
    Rng rng(seed);
    const GroupPoint origin;
    for (int i = 0; i < count; ++i) {
        const GroupPoint raw(rng.normal(), rng.normal(), rng.normal());
        const double t = o.distance(origin, raw);
        if (!(t > 1e-12)) continue;
        // rho = U^{1/4} is uniform for the homogeneous (Q = 4) volume, so the
        // candidates fill the ball evenly
        const double rho = std::pow(rng.uniform(), 0.25);
        out.push_back(dilate(rho / t, raw));
    }
    return out;
}

std::vector<GroupPoint> eps_net_greedy(const DistanceOracle& o, double eps,
                                       const std::vector<GroupPoint>& candidates) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps_net_greedy: eps must be positive");
    std::vector<GroupPoint> net;
    for (const GroupPoint& q : candidates) {
        bool separated = true;
        for (const GroupPoint& m : net) {
            if (o.distance(m, q) < eps) {
                separated = false;
                break;
            }
        }
        if (separated) net.push_back(q);
    }
    return net;
}

std::vector<GroupPoint> eps_net_greedy(const DistanceOracle& o, double eps, int candidates,
                                       std::uint64_t seed) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps_net_greedy: eps must be positive");
    return eps_net_greedy(o, eps, unit_ball_sample(o, candidates, seed));
}

std::string family_to_json(const BesicovitchFamily& f) {
    nlohmann::json j;
    j["common_point"] = nlohmann::json::array(
        {json_num(f.common_point.v.x), json_num(f.common_point.v.y), json_num(f.common_point.z)});
    nlohmann::json balls = nlohmann::json::array();
    for (const auto& b : f.balls)
        balls.push_back({{"center", nlohmann::json::array({json_num(b.center.v.x),
                                                           json_num(b.center.v.y),
                                                           json_num(b.center.z)})},
                         {"radius", json_num(b.radius)}});
    j["balls"] = balls;
    return j.dump();
}

BesicovitchFamily family_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    BesicovitchFamily f;
    const auto& cp = j.at("common_point");
    f.common_point = GroupPoint(cp.at(0).get<double>(), cp.at(1).get<double>(), cp.at(2).get<double>());
    for (const auto& b : j.at("balls")) {
        const auto& c = b.at("center");
        f.balls.push_back({GroupPoint(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()),
                           b.at("radius").get<double>()});
    }
    return f;
}

std::string trace_to_csv(const std::vector<TracePoint>& trace) {
    std::ostringstream out;
    out << "evaluations,best_cardinality\n";
    for (const auto& tp : trace) out << tp.evaluations << "," << tp.best_cardinality << "\n";
    return out.str();
}

}  // namespace heis
