#include "rtp/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rtp {

namespace {

struct TreeArc {
    int tail;
    int head;
    double cost;
    double flow;
    bool artificial;
};

class NetworkSimplex {
  public:
    NetworkSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                   const std::function<double(int, int)>& cost)
        : m_(static_cast<int>(supply.size())), n_(static_cast<int>(demand.size())), root_(m_ + n_),
          nodes_(m_ + n_ + 1), cost_(cost), adj_(nodes_), parent_(nodes_, -1), pred_(nodes_, -1), depth_(nodes_, 0),
          pot_(nodes_, 0.0), order_(nodes_)
    {
        double cmax = 0.0;
        const long long arcs = static_cast<long long>(m_) * n_;
        const long long stride = std::max<long long>(1, arcs / 4096);
        for (long long e = 0; e < arcs; e += stride)
            cmax = std::max(cmax, std::abs(cost_(static_cast<int>(e / n_), static_cast<int>(e % n_))));
        big_ = (cmax + 1.0) * nodes_ * 4.0;
        eps_ = 1e-10 * std::max(1.0, cmax);
        for (int i = 0; i < m_; ++i)
            add_arc({i, root_, big_, supply[i], true});
        for (int j = 0; j < n_; ++j)
            add_arc({root_, m_ + j, big_, demand[j], true});
        block_ = std::max<long long>(std::llround(std::sqrt(static_cast<double>(arcs))), 16);
        rebuild();
    }

    TransportSolution run()
    {
        std::size_t pivots = 0;
        int k = 0;
        int l = 0;
        while (find_entering(k, l)) {
            pivot(k, l);
            ++pivots;
        }
        TransportSolution sol{0.0, {}, pivots};
        for (const auto& a : arcs_) {
            if (a.artificial) {
                if (a.flow > 1e-9)
                    throw std::runtime_error("transport: infeasible (unbalanced masses)");
                continue;
            }
            if (a.flow > 0.0) {
                sol.cost += a.flow * a.cost;
                sol.flows.push_back({a.tail, a.head - m_, a.flow});
            }
        }
        return sol;
    }

  private:
    void add_arc(const TreeArc& a)
    {
        const int id = static_cast<int>(arcs_.size());
        arcs_.push_back(a);
        adj_[a.tail].push_back(id);
        adj_[a.head].push_back(id);
    }

    void rebuild()
    {
        std::fill(parent_.begin(), parent_.end(), -1);
        parent_[root_] = root_;
        pot_[root_] = 0.0;
        depth_[root_] = 0;
        pred_[root_] = -1;
        std::size_t head = 0;
        std::size_t tail = 0;
        order_[tail++] = root_;
        while (head < tail) {
            const int u = order_[head++];
            for (int id : adj_[u]) {
                const TreeArc& a = arcs_[id];
                const int v = a.tail == u ? a.head : a.tail;
                if (parent_[v] != -1)
                    continue;
                parent_[v] = u;
                pred_[v] = id;
                depth_[v] = depth_[u] + 1;
                pot_[v] = a.tail == u ? pot_[u] + a.cost : pot_[u] - a.cost;
                order_[tail++] = v;
            }
        }
    }

    double reduced(int i, int j) const { return cost_(i, j) + pot_[i] - pot_[m_ + j]; }

    bool find_entering(int& k, int& l)
    {
        const long long arcs = static_cast<long long>(m_) * n_;
        double best = -eps_;
        long long best_e = -1;
        long long scanned_in_block = 0;
        for (long long c = 0; c < arcs; ++c) {
            long long e = next_ + c;
            if (e >= arcs)
                e -= arcs;
            const int i = static_cast<int>(e / n_);
            const int j = static_cast<int>(e % n_);
            const double d = reduced(i, j);
            if (d < best) {
                best = d;
                best_e = e;
            }
            if (++scanned_in_block == block_) {
                scanned_in_block = 0;
                if (best_e >= 0) {
                    next_ = e + 1 >= arcs ? 0 : e + 1;
                    break;
                }
            }
        }
        if (best_e < 0)
            return false;
        k = static_cast<int>(best_e / n_);
        l = m_ + static_cast<int>(best_e % n_);
        return true;
    }

    bool points_up(int v) const { return arcs_[pred_[v]].tail == v; }

    void pivot(int k, int l)
    {
        int u = k;
        int v = l;
        while (u != v) {
            if (depth_[u] >= depth_[v])
                u = parent_[u];
            else
                v = parent_[v];
        }
        const int join = u;
        const double inf = std::numeric_limits<double>::infinity();
        double delta = inf;
        int leaving = -1;
        for (int w = k; w != join; w = parent_[w]) {
            const double d = points_up(w) ? arcs_[pred_[w]].flow : inf;
            if (d < delta) {
                delta = d;
                leaving = w;
            }
        }
        for (int w = l; w != join; w = parent_[w]) {
            const double d = points_up(w) ? inf : arcs_[pred_[w]].flow;
            if (d <= delta) {
                delta = d;
                leaving = w;
            }
        }
        if (leaving < 0)
            throw std::runtime_error("transport: unbounded pivot");
        for (int w = k; w != join; w = parent_[w])
            arcs_[pred_[w]].flow += points_up(w) ? -delta : delta;
        for (int w = l; w != join; w = parent_[w])
            arcs_[pred_[w]].flow += points_up(w) ? delta : -delta;

        const int slot = pred_[leaving];
        TreeArc& old = arcs_[slot];
        auto drop = [slot](std::vector<int>& ids) { ids.erase(std::find(ids.begin(), ids.end(), slot)); };
        drop(adj_[old.tail]);
        drop(adj_[old.head]);
        old = {k, l, cost_(k, l - m_), delta, false};
        adj_[k].push_back(slot);
        adj_[l].push_back(slot);
        rebuild();
    }

    int m_;
    int n_;
    int root_;
    int nodes_;
    const std::function<double(int, int)>& cost_;
    std::vector<TreeArc> arcs_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> parent_;
    std::vector<int> pred_;
    std::vector<int> depth_;
    std::vector<double> pot_;
    std::vector<int> order_;
    double big_ = 0.0;
    double eps_ = 0.0;
    long long block_ = 16;
    long long next_ = 0;
};

} // namespace

TransportSolution solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                  const std::function<double(int, int)>& cost)
{
    if (supply.empty() || demand.empty())
        throw std::invalid_argument("transport: empty marginal");
    for (double s : supply)
        if (!(s > 0.0))
            throw std::invalid_argument("transport: supplies must be positive");
    for (double d : demand)
        if (!(d > 0.0))
            throw std::invalid_argument("transport: demands must be positive");
    const double ts = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double td = std::accumulate(demand.begin(), demand.end(), 0.0);
    if (std::abs(ts - td) > 1e-9 * std::max(1.0, ts))
        throw std::invalid_argument("transport: supply and demand totals differ");
    std::vector<double> dem = demand;
    for (auto& d : dem)
        d *= ts / td;
    NetworkSimplex ns(supply, dem, cost);
    return ns.run();
}

} // namespace rtp
