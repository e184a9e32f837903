#pragma once

#include <span>
#include <string>
#include <vector>

#include "jumpflow/grid.hpp"

namespace jumpflow {

/// Jump-adapted time grid: the union of uniform nodes of spacing dt and all
/// jump times of the driving realization. Every jump time is a node, so mild
/// propagation is exact across jumps.
class TimeGrid {
public:
    static TimeGrid make(double t0, double t1, double dt, std::span<const double> jump_times);

    double t0() const { return nodes_.front(); }
    double t1() const { return nodes_.back(); }
    const std::vector<double>& nodes() const { return nodes_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }

    bool is_jump_node(int k) const { return jump_slot_[static_cast<std::size_t>(k)] >= 0; }
    /// Index of node k in the jump-node list, -1 if not a jump node.
    int jump_slot(int k) const { return jump_slot_[static_cast<std::size_t>(k)]; }
    /// [begin, end) range into the realization's jump arrays for node k.
    std::pair<int, int> jump_range(int k) const;
    const std::vector<int>& jump_nodes() const { return jump_nodes_; }

    /// Node indices of the uniform base nodes (shared across an ensemble).
    const std::vector<int>& uniform_nodes() const { return uniform_nodes_; }

private:
    std::vector<double> nodes_;
    std::vector<int> jump_slot_;    // per node: position in jump_nodes_ or -1
    std::vector<int> jump_nodes_;   // node indices carrying jumps, increasing
    std::vector<std::pair<int, int>> jump_ranges_; // per jump node: [begin, end) jump indices
    std::vector<int> uniform_nodes_;
};

/// Piecewise state trajectory on a jump-adapted grid. States are the
/// right-continuous values; left limits are stored at jump nodes only.
struct SolutionPath {
    TimeGrid grid;
    GridPtr space;
    std::vector<std::vector<double>> states;      // [node][i]
    std::vector<std::vector<double>> left_states; // [jump slot][i]

    const std::vector<double>& state(int k) const { return states[static_cast<std::size_t>(k)]; }
    const std::vector<double>& state_left(int k) const {
        const int slot = grid.jump_slot(k);
        return slot >= 0 ? left_states[static_cast<std::size_t>(slot)] : states[static_cast<std::size_t>(k)];
    }
    Field field_at(int k) const { return Field(space, states[static_cast<std::size_t>(k)]); }

    /// Discrete L2 norm of the state at node k.
    double l2_at(int k) const;
    double l2_left_at(int k) const;
    /// sup over nodes (including left limits at jump nodes) of |u(t)|_2.
    double sup_l2() const;
    /// sup over nodes of e^{-alpha (t - t0)} |u(t)|_2.
    double sup_l2_weighted(double alpha) const;

    /// CSV rows: t,is_jump,state_0,...,state_{n-1}.
    std::string to_csv() const;
};

/// sup over nodes of |a(t) - b(t)|_2 for two paths on the same grid,
/// optionally weighted by e^{-alpha (t - t0)}.
double sup_l2_difference(const SolutionPath& a, const SolutionPath& b, double alpha = 0.0);

} // namespace jumpflow
