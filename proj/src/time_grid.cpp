#include "jumpflow/time_grid.hpp"

#include <algorithm>
#include <cmath>

#include "jumpflow/csv.hpp"
#include "jumpflow/errors.hpp"

namespace jumpflow {

TimeGrid TimeGrid::make(double t0, double t1, double dt, std::span<const double> jump_times) {
    if (!(t1 > t0)) throw InvalidParameter("TimeGrid: window must be nonempty");
    if (!(dt > 0.0)) throw InvalidParameter("TimeGrid: dt must be > 0");

    for (std::size_t j = 1; j < jump_times.size(); ++j)
        if (jump_times[j] < jump_times[j - 1])
            throw InvalidParameter("TimeGrid: jump times must be sorted");

    TimeGrid g;
    const int n_uniform = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
    std::vector<double> uniform(static_cast<std::size_t>(n_uniform) + 1);
    for (int j = 0; j <= n_uniform; ++j)
        uniform[static_cast<std::size_t>(j)] = t0 + (t1 - t0) * j / n_uniform;
    uniform.back() = t1;

    // Merge the sorted uniform nodes with the sorted jump times, dropping
    // exact duplicates. Jump times must lie in (t0, t1].
    std::size_t ju = 0, jj = 0;
    g.nodes_.reserve(uniform.size() + jump_times.size());
    std::vector<int> node_first_jump; // first jump index landing on each node, -1 otherwise
    while (ju < uniform.size() || jj < jump_times.size()) {
        double next_jump = jj < jump_times.size() ? jump_times[jj] : 0.0;
        if (jj < jump_times.size() && (next_jump <= t0 || next_jump > t1))
            throw InvalidParameter("TimeGrid: jump time outside window");
        bool take_jump = jj < jump_times.size() && (ju >= uniform.size() || next_jump <= uniform[ju]);
        double t;
        int first_jump = -1;
        if (take_jump) {
            t = next_jump;
            first_jump = static_cast<int>(jj);
            while (jj < jump_times.size() && jump_times[jj] == t) ++jj;
            if (ju < uniform.size() && uniform[ju] == t) ++ju;
        } else {
            t = uniform[ju++];
        }
        if (!g.nodes_.empty() && t == g.nodes_.back()) continue;
        g.nodes_.push_back(t);
        node_first_jump.push_back(first_jump);
    }

    const int nn = static_cast<int>(g.nodes_.size());
    g.jump_slot_.assign(static_cast<std::size_t>(nn), -1);
    for (int k = 0; k < nn; ++k) {
        const int fj = node_first_jump[static_cast<std::size_t>(k)];
        if (fj < 0) continue;
        int end = fj;
        while (end < static_cast<int>(jump_times.size()) &&
               jump_times[static_cast<std::size_t>(end)] == g.nodes_[static_cast<std::size_t>(k)])
            ++end;
        g.jump_slot_[static_cast<std::size_t>(k)] = static_cast<int>(g.jump_nodes_.size());
        g.jump_nodes_.push_back(k);
        g.jump_ranges_.emplace_back(fj, end);
    }

    // Mark the uniform base subset by re-walking the merged list.
    g.uniform_nodes_.reserve(uniform.size());
    std::size_t p = 0;
    for (int k = 0; k < nn; ++k) {
        while (p < uniform.size() && uniform[p] < g.nodes_[static_cast<std::size_t>(k)]) ++p;
        if (p < uniform.size() && uniform[p] == g.nodes_[static_cast<std::size_t>(k)]) {
            g.uniform_nodes_.push_back(k);
            ++p;
        }
    }
    return g;
}

std::pair<int, int> TimeGrid::jump_range(int k) const {
    const int slot = jump_slot_[static_cast<std::size_t>(k)];
    return slot >= 0 ? jump_ranges_[static_cast<std::size_t>(slot)] : std::pair<int, int>{0, 0};
}

namespace {
double l2_of(std::span<const double> v, double h) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(h * acc);
}
} // namespace

double SolutionPath::l2_at(int k) const { return l2_of(states[static_cast<std::size_t>(k)], space->h); }

double SolutionPath::l2_left_at(int k) const { return l2_of(state_left(k), space->h); }

double SolutionPath::sup_l2() const { return sup_l2_weighted(0.0); }

double SolutionPath::sup_l2_weighted(double alpha) const {
    double best = 0.0;
    const double t0 = grid.t0();
    for (int k = 0; k < grid.node_count(); ++k) {
        const double w = std::exp(-alpha * (grid.nodes()[static_cast<std::size_t>(k)] - t0));
        best = std::max(best, w * l2_at(k));
        if (grid.is_jump_node(k)) best = std::max(best, w * l2_left_at(k));
    }
    return best;
}

std::string SolutionPath::to_csv() const {
    std::string out;
    for (int k = 0; k < grid.node_count(); ++k) {
        out += format_double(grid.nodes()[static_cast<std::size_t>(k)]);
        out += ',';
        out += grid.is_jump_node(k) ? '1' : '0';
        for (double v : states[static_cast<std::size_t>(k)]) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

double sup_l2_difference(const SolutionPath& a, const SolutionPath& b, double alpha) {
    if (a.grid.node_count() != b.grid.node_count())
        throw InvalidParameter("sup_l2_difference: paths must share a grid");
    const double h = a.space->h;
    const double t0 = a.grid.t0();
    double best = 0.0;
    for (int k = 0; k < a.grid.node_count(); ++k) {
        const double w = std::exp(-alpha * (a.grid.nodes()[static_cast<std::size_t>(k)] - t0));
        double acc = 0.0;
        const auto& av = a.states[static_cast<std::size_t>(k)];
        const auto& bv = b.states[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < av.size(); ++i) {
            const double d = av[i] - bv[i];
            acc += d * d;
        }
        best = std::max(best, w * std::sqrt(h * acc));
        if (a.grid.is_jump_node(k)) {
            const auto& al = a.state_left(k);
            const auto& bl = b.state_left(k);
            double acc2 = 0.0;
            for (std::size_t i = 0; i < al.size(); ++i) {
                const double d = al[i] - bl[i];
                acc2 += d * d;
            }
            best = std::max(best, w * std::sqrt(h * acc2));
        }
    }
    return best;
}

} // namespace jumpflow
