#include "lattice_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace heis_test {

using heis::Ball;
using heis::BesicovitchFamily;
using heis::dilate;
using heis::DistanceOracle;
using heis::GroupPoint;

namespace {

std::vector<GroupPoint> lattice_directions(const DistanceOracle& o, int angles = 12) {
    std::vector<GroupPoint> dirs;
    const GroupPoint origin;
    const double heights[] = {0.0, 0.08, -0.08, 0.2, -0.2, 0.45, -0.45, 1.0, -1.0};
    const double verticals[] = {0.08, 0.25, 0.5};
    for (int i = 0; i < angles; ++i) {
        const double th = 2.0 * M_PI * i / angles;
        const double c = std::cos(th), s = std::sin(th);
        std::vector<GroupPoint> raws;
        for (const double h : heights) raws.push_back(GroupPoint(c, s, h));
        for (const double e : verticals) {
            raws.push_back(GroupPoint(e * c, e * s, 1.0));
            raws.push_back(GroupPoint(e * c, e * s, -1.0));
        }
        for (const GroupPoint& raw : raws) {
            const double t = o.distance(origin, raw);
            if (t > 1e-9) dirs.push_back(dilate(1.0 / t, raw));
        }
    }
    dirs.push_back(GroupPoint(0, 0, 0));  // replaced below by pure vertical
    dirs.back() = [&] {
        const double t = o.distance(origin, GroupPoint(0, 0, 1));
        return dilate(1.0 / t, GroupPoint(0, 0, 1));
    }();
    dirs.push_back([&] {
        const double t = o.distance(origin, GroupPoint(0, 0, -1));
        return dilate(1.0 / t, GroupPoint(0, 0, -1));
    }());
    return dirs;
}

class Clique {
public:
    explicit Clique(const std::vector<std::vector<bool>>& adj) : n_(adj.size()), words_((n_ + 63) / 64) {
        bits_.assign(n_ * words_, 0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (adj[i][j]) bits_[i * words_ + j / 64] |= (std::uint64_t{1} << (j % 64));
    }

    int solve(std::vector<int>& best_members) {
        std::vector<std::uint64_t> cand(words_, ~std::uint64_t{0});
        if (n_ % 64) cand[words_ - 1] = (std::uint64_t{1} << (n_ % 64)) - 1;
        std::vector<int> cur;
        expand(cand, cur, best_members);
        return best_;
    }

private:
    std::size_t n_, words_;
    std::vector<std::uint64_t> bits_;
    int best_ = 0;

    int popcount(const std::vector<std::uint64_t>& s) const {
        int c = 0;
        for (const auto w : s) c += __builtin_popcountll(w);
        return c;
    }

    // greedy coloring upper bound on the clique number of the candidate set
    int color_bound(const std::vector<std::uint64_t>& cand) const {
        std::vector<std::uint64_t> left = cand;
        int colors = 0;
        while (popcount(left)) {
            ++colors;
            std::vector<std::uint64_t> cls = left;
            for (std::size_t w = 0; w < words_; ++w) {
                std::uint64_t bitsw = cls[w];
                while (bitsw) {
                    const int b = __builtin_ctzll(bitsw);
                    bitsw &= bitsw - 1;
                    const std::size_t v = w * 64 + b;
                    left[w] &= ~(std::uint64_t{1} << b);
                    // remove v's neighbours from this color class
                    for (std::size_t w2 = 0; w2 < words_; ++w2)
                        cls[w2] &= ~bits_[v * words_ + w2];
                    cls[w] &= ~(std::uint64_t{1} << b);
                }
            }
        }
        return colors;
    }

    void expand(std::vector<std::uint64_t>& cand, std::vector<int>& cur,
                std::vector<int>& best_members) {
        const int c = popcount(cand);
        if (static_cast<int>(cur.size()) + c <= best_) return;
        if (c == 0) {
            if (static_cast<int>(cur.size()) > best_) {
                best_ = static_cast<int>(cur.size());
                best_members = cur;
            }
            return;
        }
        if (static_cast<int>(cur.size()) + color_bound(cand) <= best_) return;
        for (std::size_t w = 0; w < words_; ++w) {
            while (cand[w]) {
                const int b = __builtin_ctzll(cand[w]);
                const std::size_t v = w * 64 + b;
                cand[w] &= ~(std::uint64_t{1} << b);
                std::vector<std::uint64_t> next(words_);
                for (std::size_t w2 = 0; w2 < words_; ++w2)
                    next[w2] = cand[w2] & bits_[v * words_ + w2];
                // v itself already removed from cand, so next ignores it
                cur.push_back(static_cast<int>(v));
                expand(next, cur, best_members);
                cur.pop_back();
                if (static_cast<int>(cur.size()) + popcount(cand) <= best_) return;
            }
        }
    }
};

}  // namespace

LatticeFamilyResult lattice_family_max(const DistanceOracle& o, int angles) {
    const double scales[] = {1.0, 0.5, 0.25};
    std::vector<Ball> balls;
    for (const GroupPoint& u : lattice_directions(o, angles))
        for (const double r : scales) balls.push_back({dilate(r, u), r});

    const std::size_t n = balls.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = o.distance(balls[i].center, balls[j].center);
            const bool ok = d > std::max(balls[i].radius, balls[j].radius) + 1e-9;
            adj[i][j] = adj[j][i] = ok;
        }
    }

    Clique clique(adj);
    std::vector<int> members;
    LatticeFamilyResult out;
    out.cardinality = clique.solve(members);
    out.family.common_point = GroupPoint();
    for (const int i : members) out.family.balls.push_back(balls[static_cast<std::size_t>(i)]);
    return out;
}

int lattice_net_size(const DistanceOracle& o, double eps) {
    // deterministic candidate sweep of the unit ball: lattice directions at a
    // ladder of dilation depths
    std::vector<GroupPoint> candidates;
    const auto dirs = lattice_directions(o);
    for (int k = 0; k < 12; ++k) {
        const double rho = 1.0 - static_cast<double>(k) / 12.0;
        if (rho <= 0.0) break;
        for (const GroupPoint& u : dirs) candidates.push_back(dilate(rho, u));
    }
    candidates.push_back(GroupPoint());
    std::vector<GroupPoint> net;
    for (const GroupPoint& q : candidates) {
        bool ok = true;
        for (const GroupPoint& m : net)
            if (o.distance(m, q) < eps) {
                ok = false;
                break;
            }
        if (ok) net.push_back(q);
    }
    return static_cast<int>(net.size());
}

}  // namespace heis_test
