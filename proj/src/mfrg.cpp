#include "fcm/mfrg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fcm/kvfile.hpp"

namespace fcm {

namespace {

std::vector<std::int64_t> site_strides(const std::vector<int>& dims) {
    std::vector<std::int64_t> s(dims.size(), 1);
    for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
        s[i] = s[i + 1] * dims[i + 1];
    return s;
}

Vec rotate_sites(Vec psi, const MeanFieldBasis& mf, const std::vector<int>& L) {
    for (int i : L) apply_site_op(psi, mf.dims, i, mf.rotation[i]);
    return psi;
}

void check_block(const MeanFieldBasis& mf, const std::vector<int>& L) {
    if (L.empty()) throw std::invalid_argument("empty block");
    for (size_t j = 0; j < L.size(); ++j) {
        if (L[j] < 0 || L[j] >= static_cast<int>(mf.dims.size()))
            throw std::invalid_argument("block site out of range");
        if (j > 0 && L[j] <= L[j - 1]) throw std::invalid_argument("block sites must ascend");
    }
}

// Dense operator on the block Hilbert space (sites in block order) from a
// list of (position within block, factor) pairs; identity elsewhere.
Mat block_embed(const std::vector<int>& bdims, const std::vector<std::pair<int, Mat>>& facs) {
    Mat full = Mat::Identity(1, 1);
    for (int p = 0; p < static_cast<int>(bdims.size()); ++p) {
        const Mat* op = nullptr;
        for (const auto& [pos, m] : facs)
            if (pos == p) op = &m;
        full = op ? kron(full, *op) : kron(full, Mat::Identity(bdims[p], bdims[p]));
    }
    return full;
}

// Apply a rectangular matrix at one position of a segmented tensor product,
// replacing dims[pos] (= m.cols()) with m.rows().
Vec apply_segment(const Vec& v, std::vector<std::int64_t>& dims, int pos, const Mat& m) {
    std::int64_t left = 1, right = 1;
    for (int i = 0; i < pos; ++i) left *= dims[i];
    for (size_t i = pos + 1; i < dims.size(); ++i) right *= dims[i];
    const std::int64_t mid = dims[pos];
    if (m.cols() != mid) throw std::invalid_argument("apply_segment: dimension mismatch");
    Vec out(left * m.rows() * right);
    for (std::int64_t l = 0; l < left; ++l)
        for (std::int64_t r = 0; r < right; ++r) {
            for (std::int64_t x = 0; x < m.rows(); ++x) {
                cplx acc = 0.0;
                for (std::int64_t y = 0; y < mid; ++y)
                    acc += m(x, y) * v((l * mid + y) * right + r);
                out((l * m.rows() + x) * right + r) = acc;
            }
        }
    dims[pos] = m.rows();
    return out;
}

Vec permute_state(const Vec& v, const std::vector<int>& dims, const std::vector<int>& order) {
    return reshape_region(v, dims, order).col(0);
}

struct BlockLayout {
    std::vector<std::vector<int>> blocks;  // sorted by first site
    std::vector<int> perm;                 // concatenated block sites
    std::vector<int> inv;                  // site -> position in perm
};

BlockLayout make_layout(std::vector<std::vector<int>> blocks, int n) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    BlockLayout lay;
    lay.blocks = std::move(blocks);
    std::vector<int> seen(n, 0);
    for (const auto& b : lay.blocks)
        for (int i : b) {
            if (i < 0 || i >= n || seen[i]++) throw std::invalid_argument("blocks must partition the sites");
            lay.perm.push_back(i);
        }
    if (static_cast<int>(lay.perm.size()) != n)
        throw std::invalid_argument("blocks must partition the sites");
    lay.inv.assign(n, 0);
    for (int p = 0; p < n; ++p) lay.inv[lay.perm[p]] = p;
    return lay;
}

std::vector<std::int64_t> parent_segments(const BlockLayout& lay, const std::vector<int>& dims) {
    std::vector<std::int64_t> seg;
    for (const auto& b : lay.blocks) {
        std::int64_t s = 1;
        for (int i : b) s *= dims[i];
        seg.push_back(s);
    }
    return seg;
}

// W^dag psi: parent full vector -> child (truncated block) vector.
Vec project_through(const Vec& parent, const std::vector<int>& dims, const BlockLayout& lay,
                    const std::vector<BlockProjector>& ps) {
    Vec v = permute_state(parent, dims, lay.perm);
    auto seg = parent_segments(lay, dims);
    for (size_t b = 0; b < ps.size(); ++b)
        v = apply_segment(v, seg, static_cast<int>(b), ps[b].isometry.adjoint());
    return v;
}

// W child: child vector -> parent full vector (natural site order).
Vec embed_through(const Vec& child, const std::vector<int>& dims, const BlockLayout& lay,
                  const std::vector<BlockProjector>& ps) {
    std::vector<std::int64_t> seg;
    for (const auto& p : ps) seg.push_back(p.isometry.cols());
    Vec v = child;
    for (size_t b = 0; b < ps.size(); ++b)
        v = apply_segment(v, seg, static_cast<int>(b), ps[b].isometry);
    // v is in permuted (block-major) site order; restore the natural order
    std::vector<int> pdims;
    for (int i : lay.perm) pdims.push_back(dims[i]);
    std::vector<int> restore(dims.size());
    for (size_t j = 0; j < dims.size(); ++j) restore[j] = lay.inv[j];
    return permute_state(v, pdims, restore);
}

// Compress each product term of a generic Hamiltonian through the block
// isometries; term count is preserved.
LocalTermSum project_terms(const LocalTermSum& h, const BlockLayout& lay,
                           const std::vector<BlockProjector>& ps) {
    std::vector<int> site_block(h.dims.size());
    std::vector<int> site_pos(h.dims.size());
    for (size_t b = 0; b < lay.blocks.size(); ++b)
        for (size_t p = 0; p < lay.blocks[b].size(); ++p) {
            site_block[lay.blocks[b][p]] = static_cast<int>(b);
            site_pos[lay.blocks[b][p]] = static_cast<int>(p);
        }
    LocalTermSum out;
    for (const auto& p : ps) out.dims.push_back(static_cast<int>(p.isometry.cols()));
    for (const auto& term : h.terms) {
        std::vector<std::vector<std::pair<int, Mat>>> by_block(ps.size());
        for (const auto& [site, op] : term.factors)
            by_block[site_block[site]].push_back({site_pos[site], op});
        ProductTerm nt;
        for (size_t b = 0; b < ps.size(); ++b) {
            if (by_block[b].empty()) continue;
            std::vector<int> bdims;
            for (int i : lay.blocks[b]) bdims.push_back(h.dims[i]);
            Mat local = block_embed(bdims, by_block[b]);
            nt.factors.push_back(
                {static_cast<int>(b), ps[b].isometry.adjoint() * local * ps[b].isometry});
        }
        out.terms.push_back(std::move(nt));
    }
    return out;
}

// Compress a factorized all-to-all Hamiltonian through the block isometries
// using per-block channel sums: an l-body channel becomes elementary
// symmetric combinations of the projected per-block operators, so the term
// count scales with the number of blocks, not site tuples.
LocalTermSum project_fch(const FullyConnectedHamiltonian& h, const BlockLayout& lay,
                         const std::vector<BlockProjector>& ps) {
    const int nb = static_cast<int>(ps.size());
    LocalTermSum out;
    for (const auto& p : ps) out.dims.push_back(static_cast<int>(p.isometry.cols()));

    auto bdims_of = [&](int b) {
        std::vector<int> bd;
        for (int i : lay.blocks[b]) bd.push_back(h.d());
        return bd;
    };
    auto project = [&](int b, const Mat& local) -> Mat {
        return ps[b].isometry.adjoint() * local * ps[b].isometry;
    };

    // on-site fields, one compressed factor per block
    for (int b = 0; b < nb; ++b) {
        auto bd = bdims_of(b);
        Mat local = Mat::Zero(ps[b].isometry.rows(), ps[b].isometry.rows());
        for (size_t p = 0; p < lay.blocks[b].size(); ++p)
            local += block_embed(bd, {{static_cast<int>(p), h.onsite()[lay.blocks[b][p]]}});
        out.terms.push_back({{{b, project(b, local)}}});
    }

    for (const auto& ch : h.channels()) {
        const int l = ch.body;
        const double mult = ch.ascending ? 1.0 : (l == 2 ? 2.0 : 6.0);
        const double coeff =
            ch.coupling * mult / std::pow(static_cast<double>(h.norm_n()), l - 1);
        // per-block single, ascending-pair and ascending-triple sums
        std::vector<Mat> s1(nb), s2(nb), s3(nb);
        for (int b = 0; b < nb; ++b) {
            auto bd = bdims_of(b);
            const auto& sites = lay.blocks[b];
            const int m = static_cast<int>(sites.size());
            const std::int64_t bdim = ps[b].isometry.rows();
            Mat a1 = Mat::Zero(bdim, bdim), a2 = Mat::Zero(bdim, bdim),
                a3 = Mat::Zero(bdim, bdim);
            for (int p = 0; p < m; ++p) a1 += block_embed(bd, {{p, ch.site_ops[sites[p]]}});
            for (int p = 0; p < m; ++p)
                for (int q = p + 1; q < m; ++q)
                    a2 += block_embed(bd, {{p, ch.site_ops[sites[p]]}, {q, ch.site_ops[sites[q]]}});
            if (l >= 3)
                for (int p = 0; p < m; ++p)
                    for (int q = p + 1; q < m; ++q)
                        for (int r = q + 1; r < m; ++r)
                            a3 += block_embed(bd, {{p, ch.site_ops[sites[p]]},
                                                   {q, ch.site_ops[sites[q]]},
                                                   {r, ch.site_ops[sites[r]]}});
            s1[b] = project(b, a1);
            s2[b] = project(b, a2);
            if (l >= 3) s3[b] = project(b, a3);
        }
        if (l == 2) {
            for (int b = 0; b < nb; ++b)
                out.terms.push_back({{{b, coeff * s2[b]}}});
            for (int b = 0; b < nb; ++b)
                for (int c = b + 1; c < nb; ++c)
                    out.terms.push_back({{{b, coeff * s1[b]}, {c, s1[c]}}});
        } else {
            for (int b = 0; b < nb; ++b)
                out.terms.push_back({{{b, coeff * s3[b]}}});
            for (int b = 0; b < nb; ++b)
                for (int c = 0; c < nb; ++c) {
                    if (b == c) continue;
                    ProductTerm t;
                    if (b < c)
                        t.factors = {{b, coeff * s2[b]}, {c, s1[c]}};
                    else
                        t.factors = {{c, coeff * s1[c]}, {b, s2[b]}};
                    out.terms.push_back(std::move(t));
                }
            for (int b = 0; b < nb; ++b)
                for (int c = b + 1; c < nb; ++c)
                    for (int e = c + 1; e < nb; ++e)
                        out.terms.push_back(
                            {{{b, coeff * s1[b]}, {c, s1[c]}, {e, s1[e]}}});
        }
    }
    return out;
}

GroundStateSolution solve_term_sum(const LocalTermSum& h, const MfrgOptions& opts) {
    if (h.dim() <= opts.dense_limit) return solve_dense_matrix(h.dense(opts.dense_limit));
    return solve_lanczos(h.dim(), [&h](const Vec& v) { return h.apply(v); }, opts.lanczos);
}

double parent_norm(const RenormalizedSystem& sys, const MfrgOptions& opts) {
    if (sys.dense_hamiltonian.size() > 0) return opnorm(sys.dense_hamiltonian);
    MatVecFn apply;
    if (sys.fch)
        apply = [&sys](const Vec& v) { return matvec(*sys.fch, v); };
    else
        apply = [&sys](const Vec& v) { return sys.hamiltonian.apply(v); };
    auto [lo, hi] = lanczos_extremes(sys.hamiltonian.dim(), apply, opts.lanczos);
    return std::max(std::abs(lo), std::abs(hi));
}

} // namespace

// --- mean-field basis --------------------------------------------------------

MeanFieldBasis mean_field_basis(const Vec& ground, const std::vector<int>& dims) {
    if (ground.size() != total_dim(dims))
        throw std::invalid_argument("mean_field_basis: state/dims mismatch");
    MeanFieldBasis mf;
    mf.dims = dims;
    for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
        Mat m = reshape_region(ground, dims, {i});
        Eigen::SelfAdjointEigenSolver<Mat> es(m * m.adjoint());
        const int d = dims[i];
        const double l0 = std::sqrt(std::max(0.0, es.eigenvalues()(d - 1)));
        const double l1 = d > 1 ? std::sqrt(std::max(0.0, es.eigenvalues()(d - 2))) : 0.0;
        if (d > 1 && l0 - l1 < kDegeneracyThreshold)
            throw degeneracy_error(
                "mean_field_basis: degenerate top Schmidt value at site " + std::to_string(i), i);
        Vec v = es.eigenvectors().col(d - 1);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        v *= std::polar(1.0, -std::arg(v(imax)));
        mf.local_state.push_back(v);
        mf.lambda0.push_back(l0);
        mf.rotation.push_back(complete_basis(v).adjoint());
    }
    return mf;
}

// --- deviation counting --------------------------------------------------------

DeviationOperator deviation_operator(const MeanFieldBasis& mf, const std::vector<int>& L) {
    check_block(mf, L);
    DeviationOperator op;
    op.sites = L;
    std::vector<int> bd;
    for (int i : L) bd.push_back(mf.dims[i]);
    const std::int64_t bdim = total_dim(bd);
    op.counts.resize(bdim);
    for (std::int64_t c = 0; c < bdim; ++c) {
        std::int64_t rem = c;
        int count = 0;
        for (int p = static_cast<int>(bd.size()) - 1; p >= 0; --p) {
            if (rem % bd[p] != 0) ++count;
            rem /= bd[p];
        }
        op.counts[c] = count;
    }
    return op;
}

std::vector<double> deviation_weights(const Vec& ground, const MeanFieldBasis& mf,
                                      const std::vector<int>& L) {
    check_block(mf, L);
    Vec rot = rotate_sites(ground, mf, L);
    auto strides = site_strides(mf.dims);
    std::vector<double> w(L.size() + 1, 0.0);
    for (std::int64_t idx = 0; idx < rot.size(); ++idx) {
        int count = 0;
        for (int i : L)
            if ((idx / strides[i]) % mf.dims[i] != 0) ++count;
        w[count] += std::norm(rot(idx));
    }
    return w;
}

double deviation_expectation(const Vec& ground, const MeanFieldBasis& mf,
                             const std::vector<int>& L) {
    auto w = deviation_weights(ground, mf, L);
    double e = 0.0;
    for (size_t x = 0; x < w.size(); ++x) e += static_cast<double>(x) * w[x];
    return e;
}

double tail_probability(const Vec& ground, const MeanFieldBasis& mf, const std::vector<int>& L,
                        int m) {
    auto w = deviation_weights(ground, mf, L);
    double p = 0.0;
    for (int x = std::max(0, m); x <= static_cast<int>(L.size()); ++x) p += w[x];
    return p;
}

Vec deviation_projection(const Vec& psi, const MeanFieldBasis& mf, const std::vector<int>& L,
                         int x) {
    check_block(mf, L);
    Vec rot = rotate_sites(psi, mf, L);
    auto strides = site_strides(mf.dims);
    for (std::int64_t idx = 0; idx < rot.size(); ++idx) {
        int count = 0;
        for (int i : L)
            if ((idx / strides[i]) % mf.dims[i] != 0) ++count;
        if (count != x) rot(idx) = 0.0;
    }
    for (int i : L) apply_site_op(rot, mf.dims, i, mf.rotation[i].adjoint());
    return rot;
}

// --- block truncation -----------------------------------------------------------

std::int64_t kept_dimension(const std::vector<int>& block_dims, int z) {
    std::vector<std::int64_t> ways(z + 1, 0);
    ways[0] = 1;
    for (int d : block_dims) {
        for (int m = z; m >= 1; --m) ways[m] += ways[m - 1] * (d - 1);
    }
    return std::accumulate(ways.begin(), ways.end(), std::int64_t{0});
}

BlockProjector block_projector(const MeanFieldBasis& mf, const std::vector<int>& L, int z) {
    check_block(mf, L);
    if (z < 0 || z > static_cast<int>(L.size()))
        throw std::invalid_argument("block_projector: z out of range");
    BlockProjector bp;
    bp.sites = L;
    bp.z = z;
    std::vector<int> bd;
    Mat u = Mat::Identity(1, 1);
    for (int i : L) {
        bd.push_back(mf.dims[i]);
        u = kron(u, mf.rotation[i].adjoint()); // columns are rotated basis states
    }
    const std::int64_t bdim = total_dim(bd);
    std::vector<std::int64_t> cols;
    for (std::int64_t c = 0; c < bdim; ++c) {
        std::int64_t rem = c;
        std::vector<int> cfg(bd.size());
        int count = 0;
        for (int p = static_cast<int>(bd.size()) - 1; p >= 0; --p) {
            cfg[p] = static_cast<int>(rem % bd[p]);
            if (cfg[p] != 0) ++count;
            rem /= bd[p];
        }
        if (count <= z) {
            cols.push_back(c);
            bp.kept_configs.push_back(cfg);
        }
    }
    bp.isometry.resize(bdim, cols.size());
    for (size_t j = 0; j < cols.size(); ++j) bp.isometry.col(j) = u.col(cols[j]);
    return bp;
}

// --- product-term Hamiltonians ----------------------------------------------------

Vec LocalTermSum::apply(const Vec& v) const {
    Vec res = Vec::Zero(v.size());
    for (const auto& t : terms) {
        Vec tmp = v;
        for (const auto& [site, op] : t.factors) apply_site_op(tmp, dims, site, op);
        res += tmp;
    }
    return res;
}

Mat LocalTermSum::dense(std::int64_t dense_limit) const {
    const std::int64_t d = dim();
    if (d > dense_limit)
        throw resource_limit_error("LocalTermSum::dense: dim " + std::to_string(d) +
                                   " exceeds limit " + std::to_string(dense_limit));
    Mat h = Mat::Zero(d, d);
    for (const auto& t : terms) {
        std::vector<std::pair<int, Mat>> facs = t.factors;
        Mat full = Mat::Identity(1, 1);
        for (int s = 0; s < static_cast<int>(dims.size()); ++s) {
            const Mat* op = nullptr;
            for (const auto& [site, m] : facs)
                if (site == s) op = &m;
            full = op ? kron(full, *op) : kron(full, Mat::Identity(dims[s], dims[s]));
        }
        h += full;
    }
    return h;
}

LocalTermSum to_term_sum(const FullyConnectedHamiltonian& h) {
    LocalTermSum out;
    out.dims = h.dims();
    const int n = h.n();
    for (int i = 0; i < n; ++i)
        if (h.onsite()[i].cwiseAbs().maxCoeff() > 0)
            out.terms.push_back({{{i, h.onsite()[i]}}});
    for (const auto& ch : h.channels()) {
        const int l = ch.body;
        const double mult = ch.ascending ? 1.0 : (l == 2 ? 2.0 : 6.0);
        const double coeff =
            ch.coupling * mult / std::pow(static_cast<double>(h.norm_n()), l - 1);
        if (l == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    out.terms.push_back({{{i, coeff * ch.site_ops[i]}, {j, ch.site_ops[j]}}});
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int k = j + 1; k < n; ++k)
                        out.terms.push_back({{{i, coeff * ch.site_ops[i]},
                                              {j, ch.site_ops[j]},
                                              {k, ch.site_ops[k]}}});
        }
    }
    return out;
}

LocalTermSum project_term_sum(const LocalTermSum& h, const std::vector<BlockProjector>& ps) {
    std::vector<std::vector<int>> blocks;
    for (const auto& p : ps) blocks.push_back(p.sites);
    auto lay = make_layout(blocks, static_cast<int>(h.dims.size()));
    // make_layout may reorder blocks; reorder the projectors to match
    std::vector<BlockProjector> ordered = ps;
    std::sort(ordered.begin(), ordered.end(),
              [](const BlockProjector& a, const BlockProjector& b) {
                  return a.sites.front() < b.sites.front();
              });
    return project_terms(h, lay, ordered);
}

// --- renormalized systems -----------------------------------------------------------

RenormalizedSystem mfrg_init(const FullyConnectedHamiltonian& h, const MfrgOptions& opts) {
    RenormalizedSystem sys;
    sys.level = 0;
    sys.dims = h.dims();
    sys.hamiltonian = to_term_sum(h);
    sys.fch = std::make_shared<FullyConnectedHamiltonian>(h);
    if (h.dim() <= opts.dense_limit) {
        sys.dense_hamiltonian = assemble_dense(h, opts.dense_limit);
        sys.ground = solve_dense(h, opts.dense_limit);
    } else {
        sys.ground = solve_lanczos(h, opts.lanczos);
    }
    sys.params = {h.constants().g0, h.constants().g1, h.constants().gbar1};
    sys.k = h.k();
    sys.level_dims = {sys.dims};
    return sys;
}

RenormalizedSystem renormalize_step(const RenormalizedSystem& sys, const MeanFieldBasis& mf,
                                    const std::vector<std::vector<int>>& blocks, int z,
                                    const MfrgOptions& opts) {
    const int n = static_cast<int>(sys.dims.size());
    auto lay = make_layout(blocks, n);
    std::vector<BlockProjector> ps;
    int max_block = 0;
    for (const auto& b : lay.blocks) {
        ps.push_back(block_projector(mf, b, std::min<int>(z, static_cast<int>(b.size()))));
        max_block = std::max(max_block, static_cast<int>(b.size()));
    }

    LocalTermSum child_h =
        sys.fch ? project_fch(*sys.fch, lay, ps) : project_terms(sys.hamiltonian, lay, ps);

    Vec projected = project_through(sys.ground.state, sys.dims, lay, ps);
    const double eps = std::max(0.0, 1.0 - projected.squaredNorm());
    if (eps >= 0.5)
        throw precondition_error("renormalize_step: projection weight loss " +
                                 std::to_string(eps) +
                                 " >= 1/2; effective-Hamiltonian bounds do not apply");

    const double hnorm = parent_norm(sys, opts);
    const double gap = sys.ground.gap;
    const double eps_bar = 9.0 * hnorm * std::sqrt(eps) / gap;

    GroundStateSolution child = solve_term_sum(child_h, opts);
    Vec embedded = embed_through(child.state, sys.dims, lay, ps);
    const cplx overlap = embedded.dot(sys.ground.state); // <embedded|parent>
    if (std::abs(overlap) > 0) {
        const cplx phase = overlap / std::abs(overlap);
        child.state *= phase;
        embedded *= phase;
    }

    LevelTrace tr;
    tr.eps = eps;
    tr.eps_bar = eps_bar;
    tr.fidelity_bound = eps_bar < 1.0 ? eps_bar / (1.0 - eps_bar)
                                      : std::numeric_limits<double>::infinity();
    tr.gap_bound = (1.0 - eps_bar) * gap;
    tr.state_change = (sys.ground.state - embedded).norm();
    tr.parent_gap = gap;
    tr.child_gap = child.gap;
    tr.parent_e0 = sys.ground.e0;
    tr.child_e0 = child.e0;
    tr.h_norm = hnorm;
    tr.precondition_ok = eps < 0.5;

    // parameter-flow bounds from the parent level's constants
    const double drob = robustness_delta(sys.params.g1, sys.params.gbar1, n, gap, sys.k);
    const double d0 = delta0_bound(sys.params.gbar1, sys.k, drob, gap, n);
    const double m0 = m0_bound(sys.params.g1, sys.params.gbar1, sys.k, n, gap);
    const double jbar = jbar_bound(max_block, d0, sys.params.g1, sys.k, n, m0);
    FlowBounds fb = parameter_flow_bounds({sys.params.g0, sys.params.g1, z, jbar});

    RenormalizedSystem out;
    out.level = sys.level + 1;
    for (const auto& p : ps) out.dims.push_back(static_cast<int>(p.isometry.cols()));
    out.hamiltonian = std::move(child_h);
    if (out.hamiltonian.dim() <= opts.dense_limit)
        out.dense_hamiltonian = out.hamiltonian.dense(opts.dense_limit);
    out.ground = std::move(child);
    out.level_isometries = sys.level_isometries;
    out.level_isometries.push_back(std::move(ps));
    out.trace = sys.trace;
    out.trace.push_back(tr);
    out.params = {fb.g0_next, fb.g1_next, fb.gbar1_next};
    out.k = sys.k;
    out.level_dims = sys.level_dims;
    out.level_dims.push_back(out.dims);
    out.cumulative_fidelity_bound = sys.cumulative_fidelity_bound + tr.fidelity_bound;
    out.cumulative_state_change = sys.cumulative_state_change + tr.state_change;
    return out;
}

RenormalizedSystem renormalize_step(const RenormalizedSystem& sys,
                                    const std::vector<std::vector<int>>& blocks, int z,
                                    const MfrgOptions& opts) {
    return renormalize_step(sys, mean_field_basis(sys.ground.state, sys.dims), blocks, z, opts);
}

Vec embed_to_level0(const RenormalizedSystem& sys, const Vec& v) {
    Vec cur = v;
    for (int t = static_cast<int>(sys.level_isometries.size()) - 1; t >= 0; --t) {
        const auto& ps = sys.level_isometries[t];
        const auto& parent_dims = sys.level_dims[t];
        std::vector<std::vector<int>> blocks;
        for (const auto& p : ps) blocks.push_back(p.sites);
        auto lay = make_layout(blocks, static_cast<int>(parent_dims.size()));
        cur = embed_through(cur, parent_dims, lay, ps);
    }
    return cur;
}

Mat composed_isometry(const RenormalizedSystem& sys, std::int64_t dense_limit) {
    const std::int64_t d0 = total_dim(sys.level_dims.front());
    const std::int64_t dc = total_dim(sys.dims);
    if (d0 > dense_limit)
        throw resource_limit_error("composed_isometry: level-0 dim " + std::to_string(d0) +
                                   " exceeds limit " + std::to_string(dense_limit));
    Mat w(d0, dc);
    for (std::int64_t j = 0; j < dc; ++j) {
        Vec e = Vec::Zero(dc);
        e(j) = 1.0;
        w.col(j) = embed_to_level0(sys, e);
    }
    return w;
}

std::vector<double> measured_onsite_norms(const RenormalizedSystem& sys) {
    std::vector<double> norms;
    for (int j = 0; j < static_cast<int>(sys.dims.size()); ++j) {
        Mat v = Mat::Zero(sys.dims[j], sys.dims[j]);
        for (const auto& t : sys.hamiltonian.terms)
            if (t.factors.size() == 1 && t.factors[0].first == j) v += t.factors[0].second;
        // remove the scalar mean-field energy shift (index 0 is the
        // all-mean-field block configuration)
        v -= v(0, 0) * Mat::Identity(v.rows(), v.cols());
        norms.push_back(opnorm(v));
    }
    return norms;
}

// --- schedules ------------------------------------------------------------------

MfrgSchedule parse_schedule_text(const std::string& text) {
    KvFile kv = parse_kv_text(text);
    MfrgSchedule sched;
    sched.stop_dim = kv.has("stop_dim") ? kv.get_int("stop_dim") : kDefaultDenseLimit;
    for (int lvl = 0;; ++lvl) {
        const std::string base = "level." + std::to_string(lvl) + ".";
        if (!kv.has(base + "block_size")) break;
        ScheduleEntry e;
        e.block_size = static_cast<int>(kv.get_int(base + "block_size"));
        e.z = static_cast<int>(kv.get_int(base + "z"));
        if (e.block_size < 1) throw std::invalid_argument("schedule: block_size >= 1 required");
        if (e.z < 0) throw std::invalid_argument("schedule: z >= 0 required");
        sched.levels.push_back(e);
    }
    if (sched.levels.empty()) throw std::invalid_argument("schedule: no levels given");
    return sched;
}

MfrgSchedule parse_schedule_file(const std::string& path) {
    KvFile kv = parse_kv_file(path);
    std::string text;
    for (const auto& e : kv.entries) text += e.key + " = " + e.value + "\n";
    return parse_schedule_text(text);
}

std::vector<std::vector<int>> consecutive_blocks(int n, int block_size) {
    if (block_size < 1) throw std::invalid_argument("block_size >= 1 required");
    std::vector<std::vector<int>> blocks;
    for (int start = 0; start < n; start += block_size) {
        std::vector<int> b;
        for (int i = start; i < std::min(n, start + block_size); ++i) b.push_back(i);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

RenormalizedSystem run_mfrg(const FullyConnectedHamiltonian& h, const MfrgSchedule& schedule,
                            const MfrgOptions& opts) {
    RenormalizedSystem sys = mfrg_init(h, opts);
    for (const auto& entry : schedule.levels) {
        if (sys.hamiltonian.dim() <= schedule.stop_dim) break;
        auto blocks = consecutive_blocks(static_cast<int>(sys.dims.size()), entry.block_size);
        sys = renormalize_step(sys, blocks, entry.z, opts);
    }
    return sys;
}

// --- parameter-flow bounds ---------------------------------------------------------

FlowBounds parameter_flow_bounds(const FlowInputs& in) {
    FlowBounds fb;
    fb.g0_next = (in.g0 + in.g1) * in.z + in.jbar;
    fb.g1_next = 16.0 * in.z * in.g1;
    fb.gbar1_next = fb.g0_next + fb.g1_next;
    return fb;
}

double robustness_delta(double g1, double gbar1, int n, double gap, int k) {
    const double gamma = 6.0 * k * k;
    return 2.0 * gamma * g1 * std::sqrt(gbar1 / (n * gap));
}

double delta0_bound(double gbar1, int k, double delta_rob, double gap, int n) {
    const double gk = gbar1 * k;
    const double ln = std::log(static_cast<double>(n));
    return std::sqrt(4.0 * gk * gk * (delta_rob / gap) * ln * ln + 123.0 * gk * gk / n);
}

double m0_bound(double g1, double gbar1, int k, int n, double gap, double eps0) {
    const double gamma = 6.0 * k * k;
    const double eps_tilde = std::pow(gap * eps0 / (9.0 * gbar1 * n), 2);
    return std::sqrt(gbar1 * n / gap) *
           (gamma * g1 / gap + 15.0 * std::pow(k, 1.5) * std::log(3.0 / eps_tilde));
}

double jbar_bound(int block_size, double delta0, double g1, int k, int n, double m0) {
    const double L = block_size;
    return 4.0 * L * (delta0 + 9.0 * g1 * std::sqrt(k * (m0 + 1.0) / n)) + g1 * k * L * L / n;
}

} // namespace fcm
