#include "fcm/solve.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "fcm/errors.hpp"
#include "fcm/rng.hpp"

namespace fcm {

namespace {

GroundStateSolution from_eigen(const RVec& evals, const Vec& ground, const MatVecFn& apply) {
    GroundStateSolution sol;
    sol.rep = StateRep::FullVector;
    sol.e0 = evals(0);
    sol.e1 = evals.size() > 1 ? evals(1) : evals(0);
    sol.gap = sol.e1 - sol.e0;
    sol.degenerate = sol.gap < kDegeneracyThreshold;
    sol.state = ground.normalized();
    sol.residual = (apply(sol.state) - sol.e0 * sol.state).norm();
    return sol;
}

} // namespace

GroundStateSolution solve_dense_matrix(const Mat& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("solve_dense_matrix: square matrix");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    RVec evals;
    Vec ground;
    if (h.imag().cwiseAbs().maxCoeff() <= 1e-13 * scale) {
        Eigen::SelfAdjointEigenSolver<RMat> es(h.real());
        evals = es.eigenvalues();
        ground = es.eigenvectors().col(0).cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        evals = es.eigenvalues();
        ground = es.eigenvectors().col(0);
    }
    return from_eigen(evals, ground, [&](const Vec& v) { return Vec(h * v); });
}

GroundStateSolution solve_dense(const FullyConnectedHamiltonian& h, std::int64_t dense_limit) {
    return solve_dense_matrix(assemble_dense(h, dense_limit));
}

namespace {

struct LanczosRun {
    std::vector<double> alpha, beta; // beta[j] links v_j and v_{j+1}
    std::vector<Vec> basis;
    RVec theta;   // current Ritz values
    RMat vectors; // tridiagonal eigenvectors
    bool exhausted = false;
};

// One Lanczos sweep with full reorthogonalization. `converged` decides when
// to stop given the current tridiagonal eigen-decomposition and last beta.
LanczosRun lanczos_sweep(std::int64_t dim, const MatVecFn& apply, const LanczosOptions& opts,
                         const std::function<bool(const RVec&, const RMat&, double)>& converged) {
    LanczosRun run;
    Rng rng(opts.seed);
    Vec v(dim);
    for (std::int64_t i = 0; i < dim; ++i) v(i) = cplx(rng.gaussian(), rng.gaussian());
    v.normalize();
    run.basis.push_back(v);

    const int max_m = static_cast<int>(std::min<std::int64_t>(opts.max_iter, dim));
    for (int j = 0; j < max_m; ++j) {
        Vec w = apply(run.basis[j]);
        double a = run.basis[j].dot(w).real();
        run.alpha.push_back(a);
        w -= a * run.basis[j];
        if (j > 0) w -= run.beta[j - 1] * run.basis[j - 1];
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& b : run.basis) w -= b.dot(w) * b;
        double bnorm = w.norm();

        // current tridiagonal spectrum
        RVec diag = Eigen::Map<const RVec>(run.alpha.data(), run.alpha.size());
        RVec sub(std::max<int>(0, j));
        for (int t = 0; t < j; ++t) sub(t) = run.beta[t];
        Eigen::SelfAdjointEigenSolver<RMat> es;
        es.computeFromTridiagonal(diag, sub);
        run.theta = es.eigenvalues();
        run.vectors = es.eigenvectors();

        if (converged(run.theta, run.vectors, bnorm)) return run;
        if (bnorm < 1e-13 || j + 1 == static_cast<int>(dim)) {
            run.exhausted = true;
            return run;
        }
        run.beta.push_back(bnorm);
        run.basis.push_back(w / bnorm);
        if (j + 1 == max_m) break;
    }
    return run; // not converged; caller decides
}

Vec ritz_vector(const LanczosRun& run, int which) {
    Vec x = Vec::Zero(run.basis[0].size());
    for (std::size_t t = 0; t < run.alpha.size(); ++t)
        x += run.vectors(t, which) * run.basis[t];
    return x.normalized();
}

} // namespace

GroundStateSolution solve_lanczos(std::int64_t dim, const MatVecFn& apply,
                                  const LanczosOptions& opts) {
    if (dim == 1) {
        Vec e = Vec::Ones(1);
        GroundStateSolution sol;
        sol.e0 = sol.e1 = apply(e)(0).real();
        sol.gap = 0.0;
        sol.state = e;
        sol.degenerate = true;
        return sol;
    }
    auto want = [&](const RVec& theta, const RMat& vecs, double bnorm) {
        if (theta.size() < 2) return false;
        int last = static_cast<int>(theta.size()) - 1;
        return bnorm * std::abs(vecs(last, 0)) < opts.tol &&
               bnorm * std::abs(vecs(last, 1)) < opts.tol;
    };
    LanczosRun run = lanczos_sweep(dim, apply, opts, want);
    const int m = static_cast<int>(run.alpha.size());
    bool ok = run.exhausted;
    if (!ok && m >= 2) {
        double bnorm = run.beta.size() == run.alpha.size() ? run.beta.back() : 0.0;
        ok = want(run.theta, run.vectors, bnorm);
    }
    Vec ground = ritz_vector(run, 0);
    double residual = (apply(ground) - run.theta(0) * ground).norm();
    if (!ok && residual > opts.tol * 100)
        throw convergence_error("lanczos failed to converge", residual);

    GroundStateSolution sol;
    sol.rep = StateRep::FullVector;
    sol.e0 = run.theta(0);
    sol.e1 = run.theta.size() > 1 ? run.theta(1) : run.theta(0);
    sol.gap = sol.e1 - sol.e0;
    sol.degenerate = sol.gap < kDegeneracyThreshold;
    sol.state = ground;
    sol.residual = residual;
    return sol;
}

GroundStateSolution solve_lanczos(const FullyConnectedHamiltonian& h, const LanczosOptions& opts) {
    return solve_lanczos(h.dim(), [&](const Vec& v) { return matvec(h, v); }, opts);
}

std::pair<double, double> lanczos_extremes(std::int64_t dim, const MatVecFn& apply,
                                           const LanczosOptions& opts) {
    if (dim == 1) {
        Vec e = Vec::Ones(1);
        double x = apply(e)(0).real();
        return {x, x};
    }
    auto want = [&](const RVec& theta, const RMat& vecs, double bnorm) {
        if (theta.size() < 2) return false;
        int last = static_cast<int>(theta.size()) - 1;
        return bnorm * std::abs(vecs(last, 0)) < opts.tol &&
               bnorm * std::abs(vecs(last, last)) < opts.tol;
    };
    LanczosRun run = lanczos_sweep(dim, apply, opts, want);
    return {run.theta(0), run.theta(run.theta.size() - 1)};
}

DickeSolution solve_lmg_dicke(int n, double gamma, double h) {
    if (n % 2 != 0) throw std::invalid_argument("solve_lmg_dicke: n must be even");
    if (n < 2 || n > 10000) throw std::invalid_argument("solve_lmg_dicke: n out of range");
    const double S = n / 2.0;

    // Collective ladder algebra in the maximal-spin sector: basis |k>,
    // k = number of lowered spins, S_z eigenvalue m = n/2 - k.
    //   sum_{i<j} sx sx + g sy sy  =  2 Sx^2 + 2 g Sy^2 - (n/2)(1+g)
    //   2 Sx^2 + 2 g Sy^2 = (1-g)/2 (S+^2 + S-^2) + (1+g)/2 (S+S- + S-S+)
    auto diag_entry = [&](int k) {
        double m = S - k;
        double anti = 2.0 * (S * (S + 1.0) - m * m); // S+S- + S-S+
        double val = -(1.0 / n) * (0.5 * (1.0 + gamma) * anti - 0.5 * n * (1.0 + gamma));
        return val - 2.0 * h * m;
    };
    auto offdiag_entry = [&](int k) { // couples k and k+2 via S-^2
        double m = S - k;
        double lower1 = S * (S + 1.0) - m * (m - 1.0);
        double lower2 = S * (S + 1.0) - (m - 1.0) * (m - 2.0);
        return -(1.0 / n) * 0.5 * (1.0 - gamma) * std::sqrt(lower1 * lower2);
    };

    // parity sectors (even/odd k) are decoupled tridiagonal problems
    struct Sector {
        RVec evals;
        RMat evecs;
        std::vector<int> ks;
    };
    auto solve_sector = [&](int parity) {
        Sector s;
        for (int k = parity; k <= n; k += 2) s.ks.push_back(k);
        int m = static_cast<int>(s.ks.size());
        RVec diag(m), sub(std::max(0, m - 1));
        for (int t = 0; t < m; ++t) diag(t) = diag_entry(s.ks[t]);
        for (int t = 0; t + 1 < m; ++t) sub(t) = offdiag_entry(s.ks[t]);
        Eigen::SelfAdjointEigenSolver<RMat> es;
        es.computeFromTridiagonal(diag, sub);
        s.evals = es.eigenvalues();
        s.evecs = es.eigenvectors();
        return s;
    };
    Sector even = solve_sector(0), odd = solve_sector(1);

    // merge the two sector spectra for E0/E1 within the maximal-spin sector
    double e0, e1;
    const Sector* ground_sector;
    if (even.evals(0) <= odd.evals(0)) {
        ground_sector = &even;
        e0 = even.evals(0);
        e1 = std::min(odd.evals(0), even.evals.size() > 1 ? even.evals(1) : odd.evals(0));
    } else {
        ground_sector = &odd;
        e0 = odd.evals(0);
        e1 = std::min(even.evals(0), odd.evals.size() > 1 ? odd.evals(1) : even.evals(0));
    }

    DickeSolution out;
    out.state.n = n;
    out.state.c = RVec::Zero(n + 1);
    for (std::size_t t = 0; t < ground_sector->ks.size(); ++t)
        out.state.c(ground_sector->ks[t]) = ground_sector->evecs(t, 0);
    // phase fix: largest-magnitude coefficient positive
    int imax = 0;
    for (int k = 0; k <= n; ++k)
        if (std::abs(out.state.c(k)) > std::abs(out.state.c(imax))) imax = k;
    if (out.state.c(imax) < 0) out.state.c = -out.state.c;
    out.e0 = e0;
    out.e1 = e1;
    out.gap = e1 - e0;

    if (n <= 8) {
        auto dense = solve_dense(build_lmg(n, gamma, h));
        out.cross_checked = true;
        out.sector_gap_is_global =
            std::abs(dense.e0 - out.e0) < 1e-8 && std::abs(dense.gap - out.gap) < 1e-8;
    }
    return out;
}

CovarianceState solve_fermion(const FermionModel& m, bool parity_strict) {
    const int n = m.n;
    if (n < 2) throw std::invalid_argument("solve_fermion: n >= 2 required");
    if (m.t.rows() != n || m.t.cols() != n || !m.t.isApprox(m.t.transpose(), 1e-12))
        throw std::invalid_argument("solve_fermion: t must be symmetric n x n");

    // H = 1/2 Psi^dag M Psi + 1/2 tr A,  Psi = (c, c^dag),
    // A_ij = -2 t_ij / n - mu delta_ij,  B_ij = kappa/n sgn(j - i)
    RMat A = -2.0 / n * m.t;
    A.diagonal().array() -= m.mu;
    RMat B = RMat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            B(i, j) = m.kappa / n;
            B(j, i) = -m.kappa / n;
        }
    RMat M(2 * n, 2 * n);
    M << A, B, -B, -A;

    Eigen::SelfAdjointEigenSolver<RMat> es(M);
    // particle-hole symmetry: spectrum is +-eps; the top n are the
    // quasiparticle energies
    RVec eps(n);
    for (int j = 0; j < n; ++j) eps(j) = es.eigenvalues()(n + j);
    RMat U = es.eigenvectors().block(0, n, n, n);
    RMat V = es.eigenvectors().block(n, n, n, n);

    // ground-state correlations: G = <c^dag c> = V V^T, F = <c c> = U V^T
    RMat G = V * V.transpose();
    RMat F = U * V.transpose();
    RMat K = 2.0 * (G + F) - RMat::Identity(n, n);

    CovarianceState cs;
    cs.n = n;
    cs.eps = eps;
    cs.gamma = RMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cs.gamma(2 * i, 2 * j + 1) = K(i, j);
            cs.gamma(2 * j + 1, 2 * i) = -K(i, j);
        }
    cs.e0 = 0.5 * (A.trace() - eps.sum());
    cs.gap = parity_strict && n >= 2 ? eps(0) + eps(1) : eps(0);
    return cs;
}

FockSolution solve_fermion_fock(const FermionModel& m, std::int64_t dense_limit) {
    const int n = m.n;
    std::int64_t dim = 1LL << n;
    if (dim > dense_limit) throw resource_limit_error("solve_fermion_fock: over dense limit");

    // Jordan-Wigner ladder operators on occupation bit strings, mode 0 most
    // significant:  c_i = Z^{(i)} (x) |0><1| (x) 1^{(n-1-i)}, so annihilating
    // mode i picks up the parity of the occupied modes before it.
    const auto occupied = [n](std::int64_t b, int i) { return (b >> (n - 1 - i)) & 1LL; };
    const auto string_sign = [n](std::int64_t b, int i) {
        std::uint64_t before = static_cast<std::uint64_t>(b) >> (n - i);
        return std::popcount(before) % 2 == 0 ? 1.0 : -1.0;
    };
    // amp <- amp * c_i^(dag) |b>, rewriting b; false when the result vanishes.
    const auto ladder = [&](std::int64_t& b, double& amp, int i, bool dagger) {
        if (occupied(b, i) == (dagger ? 1 : 0)) return false;
        amp *= string_sign(b, i);
        b ^= 1LL << (n - 1 - i);
        return true;
    };

    Mat H = Mat::Zero(dim, dim);
    for (std::int64_t b = 0; b < dim; ++b) {
        H(b, b) -= m.mu * std::popcount(static_cast<std::uint64_t>(b));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                std::int64_t b2;
                double amp;
                // -(2 t_ij / n)(c_i^dag c_j + c_j^dag c_i)
                b2 = b, amp = -2.0 * m.t(i, j) / n;
                if (ladder(b2, amp, j, false) && ladder(b2, amp, i, true)) H(b2, b) += amp;
                b2 = b, amp = -2.0 * m.t(i, j) / n;
                if (ladder(b2, amp, i, false) && ladder(b2, amp, j, true)) H(b2, b) += amp;
                // (kappa / n)(c_i^dag c_j^dag + c_j c_i)
                b2 = b, amp = m.kappa / n;
                if (ladder(b2, amp, j, true) && ladder(b2, amp, i, true)) H(b2, b) += amp;
                b2 = b, amp = m.kappa / n;
                if (ladder(b2, amp, i, false) && ladder(b2, amp, j, false)) H(b2, b) += amp;
            }
    }
    auto sol = solve_dense_matrix(H);
    FockSolution out;
    out.e0 = sol.e0;
    out.e1 = sol.e1;
    out.gap = sol.gap;
    out.ground = sol.state;
    return out;
}

} // namespace fcm
