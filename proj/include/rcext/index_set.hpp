#ifndef RCEXT_INDEX_SET_HPP
#define RCEXT_INDEX_SET_HPP

#include <map>
#include <memory>
#include <utility>
#include <vector>

namespace rcext {

/// Finite symmetric exponent set on Z^d: contains 0, closed under negation,
/// duplicate-free, in fixed lexicographic order.
///
/// Coefficient sequences, weight matrices and the solver's real coordinate
/// chart all index against the ordering fixed here.
class IndexSet {
public:
    /// Full box {-r_1..r_1} x ... x {-r_d..r_d}.
    static IndexSet box(const std::vector<int>& radii);

    /// Validating constructor; exponents are sorted lexicographically.
    explicit IndexSet(std::vector<std::vector<int>> exponents);

    int dim() const { return d_->dim; }
    int size() const { return static_cast<int>(d_->exps.size()); }
    const std::vector<int>& exponent(int i) const { return d_->exps[i]; }
    const std::vector<std::vector<int>>& exponents() const { return d_->exps; }

    /// Position of k, or -1 when absent.
    int find(const std::vector<int>& k) const;
    /// Position of -k for the exponent at position i.
    int conjugate_index(int i) const { return d_->conj[i]; }
    int zero_index() const { return d_->zero; }

    /// Representative positions of the +/- pairs: (i, conjugate_index(i))
    /// with i listed once per pair. The zero exponent is not included.
    const std::vector<int>& pair_representatives() const { return d_->reps; }

    /// max_k |k_axis| over the set.
    int max_abs(int axis) const { return d_->max_abs[axis]; }

    bool is_box() const { return d_->is_box; }
    /// Per-axis radii; valid only when is_box().
    const std::vector<int>& box_radii() const { return d_->max_abs; }

    bool operator==(const IndexSet& o) const;
    bool operator!=(const IndexSet& o) const { return !(*this == o); }

private:
    struct Data {
        int dim = 0;
        std::vector<std::vector<int>> exps;
        std::vector<int> conj;
        std::vector<int> reps;
        std::vector<int> max_abs;
        std::map<std::vector<int>, int> lookup;
        int zero = -1;
        bool is_box = false;
    };
    std::shared_ptr<const Data> d_;
};

}  // namespace rcext

#endif
