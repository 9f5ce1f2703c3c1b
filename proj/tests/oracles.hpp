#pragma once

// Independent brute-force reference implementations used only by tests.
// These deliberately avoid the library's assembly/solver code paths.

#include <vector>

#include "fcm/linalg.hpp"
#include "fcm/model.hpp"

namespace oracle {

using fcm::Mat;
using fcm::Vec;
using fcm::cplx;

// kron chain with `op` at `site`, identity elsewhere
inline Mat embed1(int n, int d, int site, const Mat& op) {
    Mat out = Mat::Identity(1, 1);
    for (int i = 0; i < n; ++i)
        out = fcm::kron(out, i == site ? op : Mat::Identity(d, d));
    return out;
}

// naive tuple-loop assembly: explicit loops per convention, dense products
inline Mat naive_dense(const fcm::FullyConnectedHamiltonian& h) {
    const int n = h.n(), d = h.d();
    const double N = h.norm_n();
    Mat out = Mat::Zero(h.dim(), h.dim());
    for (int i = 0; i < n; ++i) out += embed1(n, d, i, h.onsite()[i]);
    for (const auto& ch : h.channels()) {
        auto term2 = [&](int i, int j) -> Mat {
            return (ch.coupling / N) * (embed1(n, d, i, ch.site_ops[i]) * embed1(n, d, j, ch.site_ops[j]));
        };
        auto term3 = [&](int i, int j, int l) -> Mat {
            return (ch.coupling / (N * N)) * (embed1(n, d, i, ch.site_ops[i]) *
                                              embed1(n, d, j, ch.site_ops[j]) *
                                              embed1(n, d, l, ch.site_ops[l]));
        };
        if (ch.body == 2) {
            if (ch.ascending) {
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) out += term2(i, j);
            } else {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (i != j) out += term2(i, j);
            }
        } else {
            if (ch.ascending) {
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        for (int l = j + 1; l < n; ++l) out += term3(i, j, l);
            } else {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int l = 0; l < n; ++l)
                            if (i != j && j != l && i != l) out += term3(i, j, l);
            }
        }
    }
    return out;
}

// terms fully inside `sites`, embedded in the full n-site space
inline Mat embed_subset(const fcm::FullyConnectedHamiltonian& h, const std::vector<int>& sites) {
    const int n = h.n(), d = h.d();
    const double N = h.norm_n();
    std::vector<bool> in(n, false);
    for (int s : sites) in[s] = true;
    Mat out = Mat::Zero(h.dim(), h.dim());
    for (int i = 0; i < n; ++i)
        if (in[i]) out += embed1(n, d, i, h.onsite()[i]);
    for (const auto& ch : h.channels()) {
        double mult = ch.ascending ? 1.0 : (ch.body == 2 ? 2.0 : 6.0);
        auto add = [&](const std::vector<int>& tup) {
            for (int s : tup)
                if (!in[s]) return;
            Mat term = Mat::Identity(h.dim(), h.dim());
            for (int s : tup) term = term * embed1(n, d, s, ch.site_ops[s]);
            double pref = mult * ch.coupling;
            for (int p = 1; p < ch.body; ++p) pref /= N;
            out += pref * term;
        };
        if (ch.body == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) add({i, j});
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int l = j + 1; l < n; ++l) add({i, j, l});
        }
    }
    return out;
}

// cross terms between disjoint a and b (2-body: one site in each; 3-body:
// any split with at least one site in each and none outside a ∪ b)
inline Mat naive_cross(const fcm::FullyConnectedHamiltonian& h, const std::vector<int>& a,
                       const std::vector<int>& b) {
    const int n = h.n(), d = h.d();
    const double N = h.norm_n();
    std::vector<int> side(n, 0); // 0 = outside, 1 = a, 2 = b
    for (int s : a) side[s] = 1;
    for (int s : b) side[s] = 2;
    Mat out = Mat::Zero(h.dim(), h.dim());
    auto touches_both = [&](const std::vector<int>& tup) {
        bool ina = false, inb = false;
        for (int s : tup) {
            if (side[s] == 0) return false;
            if (side[s] == 1) ina = true;
            if (side[s] == 2) inb = true;
        }
        return ina && inb;
    };
    for (const auto& ch : h.channels()) {
        double mult = ch.ascending ? 1.0 : (ch.body == 2 ? 2.0 : 6.0);
        auto add = [&](const std::vector<int>& tup) {
            if (!touches_both(tup)) return;
            Mat term = Mat::Identity(h.dim(), h.dim());
            for (int s : tup) term = term * embed1(n, d, s, ch.site_ops[s]);
            double pref = mult * ch.coupling;
            for (int p = 1; p < ch.body; ++p) pref /= N;
            out += pref * term;
        };
        if (ch.body == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) add({i, j});
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int l = j + 1; l < n; ++l) add({i, j, l});
        }
    }
    return out;
}

} // namespace oracle
