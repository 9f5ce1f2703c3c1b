#include "fcm/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fcm/kvfile.hpp"
#include "fcm/rng.hpp"

namespace fcm {

namespace {

const char* kHermTolMsg = "operator not Hermitian within 1e-12";

void require_hermitian(const Mat& m, const char* what) {
    if (!is_hermitian(m, 1e-12)) throw std::invalid_argument(std::string(what) + ": " + kHermTolMsg);
}

// Enumerate ascending `body`-tuples of {0..n-1} (body in {2,3}).
template <typename F>
void for_each_ascending(int n, int body, F&& f) {
    if (body == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) f(std::vector<int>{i, j});
    } else if (body == 3) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int l = j + 1; l < n; ++l) f(std::vector<int>{i, j, l});
    } else {
        throw std::invalid_argument("unsupported body count");
    }
}

// dense += coeff * (product of ops embedded at `sites`)
void add_term(Mat& dense, int n, int d, const std::vector<int>& sites,
              const std::vector<const Mat*>& ops, double coeff) {
    const std::int64_t dim = dense.rows();
    const int l = static_cast<int>(sites.size());
    std::vector<std::int64_t> stride(l);
    for (int j = 0; j < l; ++j) {
        std::int64_t s = 1;
        for (int p = sites[j] + 1; p < n; ++p) s *= d;
        stride[j] = s;
    }
    const std::int64_t combos = [&] {
        std::int64_t c = 1;
        for (int j = 0; j < l; ++j) c *= d;
        return c;
    }();
    for (std::int64_t col = 0; col < dim; ++col) {
        std::int64_t base = col;
        std::vector<int> v(l);
        for (int j = 0; j < l; ++j) {
            v[j] = static_cast<int>((col / stride[j]) % d);
            base -= v[j] * stride[j];
        }
        for (std::int64_t w = 0; w < combos; ++w) {
            std::int64_t row = base;
            cplx amp = coeff;
            std::int64_t rem = w;
            for (int j = 0; j < l; ++j) {
                int wj = static_cast<int>(rem % d);
                rem /= d;
                row += wj * stride[j];
                amp *= (*ops[j])(wj, v[j]);
            }
            if (amp != cplx(0.0)) dense(row, col) += amp;
        }
    }
}

Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
Mat pauli_y() {
    Mat m(2, 2);
    m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    return m;
}
Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

} // namespace

FullyConnectedHamiltonian::FullyConnectedHamiltonian(int n, int d, int k,
                                                     std::vector<Mat> onsite,
                                                     std::vector<Channel> channels, int norm_n)
    : n_(n), d_(d), k_(k), norm_n_(norm_n < 0 ? n : norm_n), onsite_(std::move(onsite)),
      channels_(std::move(channels)) {
    if (n_ < 1 || d_ < 2) throw std::invalid_argument("bad n or d");
    if (static_cast<int>(onsite_.size()) != n_) throw std::invalid_argument("onsite size != n");
    dim_ = 1;
    for (int i = 0; i < n_; ++i) dim_ *= d_;

    double g0 = 0.0;
    for (const auto& v : onsite_) {
        require_hermitian(v, "onsite term");
        g0 = std::max(g0, opnorm(v));
    }
    double g1 = 0.0;
    for (const auto& ch : channels_) {
        if (ch.body != 2 && ch.body != 3) throw std::invalid_argument("channel body must be 2 or 3");
        if (static_cast<int>(ch.site_ops.size()) != n_)
            throw std::invalid_argument("channel site_ops size != n");
        for (const auto& h : ch.site_ops) {
            require_hermitian(h, "channel factor");
            if (opnorm(h) > 1.0 + 1e-12)
                throw std::invalid_argument("channel factor norm exceeds 1");
        }
        g1 += std::abs(ch.coupling);
    }
    constants_ = {g0, g1, g0 + g1};
}

Bipartition make_bipartition(int n, const std::vector<int>& a) {
    Bipartition bp;
    bp.a = a;
    std::sort(bp.a.begin(), bp.a.end());
    std::set<int> in(bp.a.begin(), bp.a.end());
    if (static_cast<int>(in.size()) != static_cast<int>(bp.a.size()))
        throw std::invalid_argument("bipartition: duplicate sites");
    for (int s : bp.a)
        if (s < 0 || s >= n) throw std::invalid_argument("bipartition: site out of range");
    for (int s = 0; s < n; ++s)
        if (!in.count(s)) bp.b.push_back(s);
    return bp;
}

Bipartition half_cut(int n) {
    std::vector<int> a(n / 2);
    for (int i = 0; i < n / 2; ++i) a[i] = i;
    return make_bipartition(n, a);
}

FullyConnectedHamiltonian build_lmg(int n, double gamma, double h) {
    if (n < 2) throw std::invalid_argument("build_lmg: n >= 2 required");
    Channel cx{-1.0, std::vector<Mat>(n, pauli_x()), 2, true};
    Channel cy{-gamma, std::vector<Mat>(n, pauli_y()), 2, true};
    std::vector<Mat> onsite(n, -h * pauli_z());
    return FullyConnectedHamiltonian(n, 2, 2, std::move(onsite), {std::move(cx), std::move(cy)});
}

FullyConnectedHamiltonian build_random_gapped(int n, int d, int k, std::uint64_t seed,
                                               int channel_count) {
    if (d < 2) throw std::invalid_argument("build_random_gapped: d >= 2 required");
    if (k != 2 && k != 3) throw std::invalid_argument("build_random_gapped: k in {2,3}");
    Rng rng(seed);
    std::vector<Channel> channels;
    double g1 = 0.0;
    for (int s = 0; s < channel_count; ++s) {
        Channel ch;
        ch.coupling = rng.uniform(-1.0, 1.0);
        ch.body = k;
        ch.ascending = true;
        for (int i = 0; i < n; ++i) {
            Mat g(d, d);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) g(r, c) = cplx(rng.gaussian(), rng.gaussian());
            Mat herm = 0.5 * (g + g.adjoint());
            ch.site_ops.push_back(herm / opnorm(herm));
        }
        g1 += std::abs(ch.coupling);
        channels.push_back(std::move(ch));
    }
    // uniform strong field keeps random draws generically gapped
    Mat field = Mat::Zero(d, d);
    for (int r = 0; r < d; ++r) field(r, r) = 1.0 - 2.0 * r / (d - 1.0);
    std::vector<Mat> onsite(n, 3.0 * g1 * field);
    return FullyConnectedHamiltonian(n, d, k, std::move(onsite), std::move(channels));
}

FermionModel make_fermion_random(int n, double kappa, double mu, std::uint64_t seed) {
    FermionModel m;
    m.n = n;
    m.kappa = kappa;
    m.mu = mu;
    m.seed = seed;
    m.t = RMat::Zero(n, n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m.t(i, j) = m.t(j, i) = rng.uniform();
    return m;
}

FermionModel make_fermion_t_zero(int n, double kappa, double mu) {
    FermionModel m;
    m.n = n;
    m.kappa = kappa;
    m.mu = mu;
    m.t = RMat::Zero(n, n);
    return m;
}

Mat assemble_dense(const FullyConnectedHamiltonian& h, std::int64_t dense_limit) {
    if (h.dim() > dense_limit) {
        std::ostringstream os;
        os << "dense assembly of dimension " << h.dim() << " exceeds limit " << dense_limit;
        throw resource_limit_error(os.str());
    }
    const int n = h.n(), d = h.d();
    Mat dense = Mat::Zero(h.dim(), h.dim());
    for (int i = 0; i < n; ++i) add_term(dense, n, d, {i}, {&h.onsite()[i]}, 1.0);
    for (const auto& ch : h.channels()) {
        double pref = ch.coupling;
        for (int p = 1; p < ch.body; ++p) pref /= h.norm_n();
        for_each_ascending(n, ch.body, [&](const std::vector<int>& tup) {
            std::vector<const Mat*> ops;
            for (int s : tup) ops.push_back(&ch.site_ops[s]);
            // ordered convention counts every permutation of the tuple; the
            // factors commute (distinct sites) so it is a multiplicity
            double mult = ch.ascending ? 1.0 : (ch.body == 2 ? 2.0 : 6.0);
            add_term(dense, n, d, tup, ops, pref * mult);
        });
    }
    return dense;
}

Vec matvec(const FullyConnectedHamiltonian& h, const Vec& v) {
    if (v.size() != h.dim()) throw std::invalid_argument("matvec: length mismatch");
    const int n = h.n();
    const auto dims = h.dims();

    auto apply_sum = [&](const Vec& x, const std::vector<Mat>& ops, int power) {
        // sum_i embed(ops[i]^power) x
        Vec acc = Vec::Zero(x.size());
        for (int i = 0; i < n; ++i) {
            Mat op = ops[i];
            for (int p = 1; p < power; ++p) op = op * ops[i];
            Vec tmp = x;
            apply_site_op(tmp, dims, i, op);
            acc += tmp;
        }
        return acc;
    };

    Vec out = Vec::Zero(v.size());
    for (int i = 0; i < n; ++i) {
        Vec tmp = v;
        apply_site_op(tmp, dims, i, h.onsite()[i]);
        out += tmp;
    }
    for (const auto& ch : h.channels()) {
        double pref = ch.coupling;
        for (int p = 1; p < ch.body; ++p) pref /= h.norm_n();
        // elementary symmetric polynomials in commuting site operators:
        //   e2 = (p1^2 - p2)/2,  e3 = (p1^3 - 3 p2 p1 + 2 p3)/6
        Vec p1 = apply_sum(v, ch.site_ops, 1);
        if (ch.body == 2) {
            Vec e2 = 0.5 * (apply_sum(p1, ch.site_ops, 1) - apply_sum(v, ch.site_ops, 2));
            out += pref * (ch.ascending ? 1.0 : 2.0) * e2;
        } else {
            Vec p1p1 = apply_sum(p1, ch.site_ops, 1);
            Vec e3 = (apply_sum(p1p1, ch.site_ops, 1) - 3.0 * apply_sum(p1, ch.site_ops, 2) +
                      2.0 * apply_sum(v, ch.site_ops, 3)) /
                     6.0;
            out += pref * (ch.ascending ? 1.0 : 6.0) * e3;
        }
    }
    return out;
}

FullyConnectedHamiltonian subset_hamiltonian(const FullyConnectedHamiltonian& h,
                                             const std::vector<int>& L) {
    if (L.empty()) throw std::invalid_argument("subset_hamiltonian: empty L");
    std::vector<int> sites = L;
    std::sort(sites.begin(), sites.end());
    for (int s : sites)
        if (s < 0 || s >= h.n()) throw std::invalid_argument("subset_hamiltonian: site out of range");
    std::vector<Mat> onsite;
    for (int s : sites) onsite.push_back(h.onsite()[s]);
    std::vector<Channel> channels;
    for (const auto& ch : h.channels()) {
        Channel sub;
        sub.coupling = ch.coupling;
        sub.body = ch.body;
        sub.ascending = ch.ascending;
        for (int s : sites) sub.site_ops.push_back(ch.site_ops[s]);
        channels.push_back(std::move(sub));
    }
    return FullyConnectedHamiltonian(static_cast<int>(sites.size()), h.d(), h.k(),
                                     std::move(onsite), std::move(channels), h.norm_n());
}

std::vector<BoundaryChannel> boundary_interaction(const FullyConnectedHamiltonian& h,
                                                  const std::vector<int>& a,
                                                  const std::vector<int>& b) {
    std::set<int> sa(a.begin(), a.end());
    for (int s : b)
        if (sa.count(s)) throw std::invalid_argument("boundary_interaction: regions overlap");
    std::vector<BoundaryChannel> out;
    if (a.empty() || b.empty()) return out;
    for (const auto& ch : h.channels()) {
        auto collect = [&](const std::vector<int>& region) {
            std::vector<std::pair<int, Mat>> ops;
            for (int s : region) ops.emplace_back(s, ch.site_ops[s]);
            return ops;
        };
        // every unordered tuple is a set; ordered channels carry the
        // permutation count as a multiplicity
        double mult = ch.ascending ? 1.0 : (ch.body == 2 ? 2.0 : 6.0);
        if (ch.body == 2) {
            out.push_back({mult * ch.coupling, 1, 1, collect(a), collect(b)});
        } else {
            out.push_back({mult * ch.coupling, 2, 1, collect(a), collect(b)});
            out.push_back({mult * ch.coupling, 1, 2, collect(a), collect(b)});
        }
    }
    return out;
}

Mat assemble_boundary(const std::vector<BoundaryChannel>& channels, int n, int d, int norm_n,
                      std::int64_t dense_limit) {
    std::int64_t dim = 1;
    for (int i = 0; i < n; ++i) dim *= d;
    if (dim > dense_limit) throw resource_limit_error("assemble_boundary: over dense limit");
    Mat dense = Mat::Zero(dim, dim);
    for (const auto& bc : channels) {
        double pref = bc.coupling;
        for (int p = 1; p < bc.body_a + bc.body_b; ++p) pref /= norm_n;
        auto tuples = [&](const std::vector<std::pair<int, Mat>>& ops, int body) {
            std::vector<std::vector<int>> out; // indices into ops
            int m = static_cast<int>(ops.size());
            if (body == 1) {
                for (int i = 0; i < m; ++i) out.push_back({i});
            } else {
                for_each_ascending(m, body, [&](const std::vector<int>& t) { out.push_back(t); });
            }
            return out;
        };
        for (const auto& ta : tuples(bc.a_ops, bc.body_a)) {
            for (const auto& tb : tuples(bc.b_ops, bc.body_b)) {
                std::vector<int> sites;
                std::vector<const Mat*> ops;
                for (int i : ta) {
                    sites.push_back(bc.a_ops[i].first);
                    ops.push_back(&bc.a_ops[i].second);
                }
                for (int i : tb) {
                    sites.push_back(bc.b_ops[i].first);
                    ops.push_back(&bc.b_ops[i].second);
                }
                add_term(dense, n, d, sites, ops, pref);
            }
        }
    }
    return dense;
}

ExtensivenessConstants extensiveness_constants(const FullyConnectedHamiltonian& h) {
    return h.constants();
}

ModelSpec parse_model_text(const std::string& text) {
    KvFile kv = parse_kv_text(text);
    ModelSpec spec;
    spec.kind = kv.get("kind");
    std::set<std::string> allowed = {"kind", "n", "d", "k", "seed"};
    if (spec.kind == "lmg") {
        allowed.insert({"gamma", "h"});
    } else if (spec.kind == "fermion") {
        allowed.insert({"kappa", "mu", "t_zero"});
    } else if (spec.kind == "random") {
        allowed.insert({"channels"});
    } else {
        throw std::invalid_argument("unknown model kind: " + spec.kind);
    }
    for (const auto& e : kv.entries) {
        if (!e.section.empty() && e.section != "model") {
            std::ostringstream os;
            os << "unknown section '" << e.section << "' at line " << e.line;
            throw std::invalid_argument(os.str());
        }
        if (!allowed.count(e.key)) {
            std::ostringstream os;
            os << "unknown key '" << e.key << "' at line " << e.line;
            throw std::invalid_argument(os.str());
        }
    }
    spec.n = static_cast<int>(kv.get_int("n"));
    spec.d = kv.has("d") ? static_cast<int>(kv.get_int("d")) : 2;
    spec.k = kv.has("k") ? static_cast<int>(kv.get_int("k")) : 2;
    spec.seed = kv.has("seed") ? kv.get_u64("seed") : 0;
    if (spec.kind == "lmg") {
        spec.gamma = kv.get_double("gamma");
        spec.h = kv.get_double("h");
    } else if (spec.kind == "fermion") {
        spec.kappa = kv.get_double("kappa");
        spec.mu = kv.get_double("mu");
        spec.t_zero = kv.get_bool("t_zero", false);
    } else {
        spec.channels = static_cast<int>(kv.get_int("channels"));
    }
    return spec;
}

ModelSpec parse_model_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open model file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_model_text(buf.str());
}

FullyConnectedHamiltonian build_spin_model(const ModelSpec& spec) {
    if (spec.kind == "lmg") return build_lmg(spec.n, spec.gamma, spec.h);
    if (spec.kind == "random")
        return build_random_gapped(spec.n, spec.d, spec.k, spec.seed, spec.channels);
    throw std::invalid_argument("build_spin_model: kind is not a spin model: " + spec.kind);
}

FermionModel build_fermion_model(const ModelSpec& spec) {
    if (spec.kind != "fermion")
        throw std::invalid_argument("build_fermion_model: kind mismatch: " + spec.kind);
    if (spec.t_zero) return make_fermion_t_zero(spec.n, spec.kappa, spec.mu);
    return make_fermion_random(spec.n, spec.kappa, spec.mu, spec.seed);
}

} // namespace fcm
