#include "rcext/index_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace rcext {

IndexSet IndexSet::box(const std::vector<int>& radii) {
    if (radii.empty()) throw std::invalid_argument("IndexSet::box: empty radii");
    for (int r : radii)
        if (r < 0) throw std::invalid_argument("IndexSet::box: negative radius");
    const int d = static_cast<int>(radii.size());
    std::vector<std::vector<int>> exps;
    std::vector<int> k(d);
    // odometer over the box in lexicographic order
    for (int a = 0; a < d; ++a) k[a] = -radii[a];
    while (true) {
        exps.push_back(k);
        int a = d - 1;
        while (a >= 0 && k[a] == radii[a]) { k[a] = -radii[a]; --a; }
        if (a < 0) break;
        ++k[a];
    }
    return IndexSet(std::move(exps));
}

IndexSet::IndexSet(std::vector<std::vector<int>> exponents) {
    auto data = std::make_shared<Data>();
    if (exponents.empty()) throw std::invalid_argument("IndexSet: empty exponent list");
    data->dim = static_cast<int>(exponents.front().size());
    if (data->dim < 1) throw std::invalid_argument("IndexSet: zero dimension");
    for (const auto& k : exponents)
        if (static_cast<int>(k.size()) != data->dim)
            throw std::invalid_argument("IndexSet: inconsistent exponent dimension");

    std::sort(exponents.begin(), exponents.end());
    if (std::adjacent_find(exponents.begin(), exponents.end()) != exponents.end())
        throw std::invalid_argument("IndexSet: duplicate exponent");
    data->exps = std::move(exponents);

    const int n = static_cast<int>(data->exps.size());
    for (int i = 0; i < n; ++i) data->lookup.emplace(data->exps[i], i);

    data->conj.resize(n);
    data->max_abs.assign(data->dim, 0);
    for (int i = 0; i < n; ++i) {
        std::vector<int> neg(data->dim);
        bool is_zero = true;
        for (int a = 0; a < data->dim; ++a) {
            neg[a] = -data->exps[i][a];
            if (data->exps[i][a] != 0) is_zero = false;
            data->max_abs[a] = std::max(data->max_abs[a], std::abs(data->exps[i][a]));
        }
        auto it = data->lookup.find(neg);
        if (it == data->lookup.end())
            throw std::invalid_argument("IndexSet: set is not symmetric (missing -k)");
        data->conj[i] = it->second;
        if (is_zero) data->zero = i;
    }
    if (data->zero < 0) throw std::invalid_argument("IndexSet: zero exponent missing");

    for (int i = 0; i < n; ++i)
        if (i < data->conj[i]) data->reps.push_back(i);

    long box_count = 1;
    for (int a = 0; a < data->dim; ++a) box_count *= 2L * data->max_abs[a] + 1;
    data->is_box = (box_count == n);

    d_ = std::move(data);
}

int IndexSet::find(const std::vector<int>& k) const {
    auto it = d_->lookup.find(k);
    return it == d_->lookup.end() ? -1 : it->second;
}

bool IndexSet::operator==(const IndexSet& o) const {
    if (d_ == o.d_) return true;
    return d_->exps == o.d_->exps;
}

}  // namespace rcext
