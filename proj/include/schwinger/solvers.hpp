#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "schwinger/common.hpp"
#include "schwinger/hamiltonian.hpp"

namespace schwinger {

struct LanczosOptions {
    int n_eigs = 1;
    double tol = 1e-10;           // residual norm per eigenpair
    int max_total_iter = 6000;    // matvec budget across restarts
    int window = 0;               // 0: pick from memory budget
    std::int64_t memory_budget = std::int64_t(1200) * 1024 * 1024;
    int dense_fallback_dim = 512;
};

template <class Scalar>
struct EigenPairs {
    Eigen::VectorXd values;                                   // ascending
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // columns
    int iterations = 0;
    bool converged = false;
    double max_residual = 0.0;
};

// Lowest eigenpairs of a Hermitian operator by thick-restart Lanczos with
// full reorthogonalization inside the stored window. Deterministic start
// vector (all ones, normalized) so repeated runs agree bitwise.
template <class Scalar, class Op>
EigenPairs<Scalar> lanczos_lowest(Op&& apply, std::int64_t dim, LanczosOptions opts = {}) {
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (dim < 1) throw ValidationError("empty operator");
    if (opts.n_eigs < 1) throw ValidationError("n_eigs must be >= 1");
    const int n_eigs = static_cast<int>(std::min<std::int64_t>(opts.n_eigs, dim));

    int window = opts.window;
    if (window <= 0) {
        std::int64_t per_vec = dim * static_cast<std::int64_t>(sizeof(Scalar));
        window = static_cast<int>(std::min<std::int64_t>(
            600, std::max<std::int64_t>(2 * n_eigs + 20, opts.memory_budget / std::max<std::int64_t>(per_vec, 1))));
    }
    window = static_cast<int>(std::min<std::int64_t>(window, dim));
    window = std::max(window, std::min<int>(static_cast<int>(dim), n_eigs + 2));

    Mat V(dim, window + 1);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(window + 1, window + 1);

    // Deterministic start vector. A plain all-ones seed is orthogonal to
    // every antisymmetric eigenvector of a reflection-symmetric operator,
    // so it is skewed by a fixed quasi-random ripple.
    for (std::int64_t i = 0; i < dim; ++i)
        V(i, 0) = Scalar(1.0 + 0.5 * std::sin(0.618033988749895 * double(i + 1)));
    V.col(0) /= V.col(0).norm();

    int s = 0;        // filled basis vectors
    int kept = 0;     // thick-restart block size
    int total_iter = 0;
    Vec w(dim);

    auto reorthogonalize = [&](Vec& x, int count) {
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::Vector<Scalar, Eigen::Dynamic> h = V.leftCols(count).adjoint() * x;
            x.noalias() -= V.leftCols(count) * h;
        }
    };

    EigenPairs<Scalar> out;
    Eigen::VectorXd ritz;      // current Ritz values
    Eigen::MatrixXd ritz_vecs; // eigenvectors of T
    double beta_last = 0.0;
    bool breakdown = false;

    while (true) {
        // Extend the Krylov basis up to the window.
        while (s < window && !breakdown) {
            int j = s;
            apply(V.col(j), w);
            ++total_iter;
            if (j == kept && kept > 0) {
                for (int i = 0; i < kept; ++i) w -= Scalar(T(i, j)) * V.col(i);
            } else if (j > 0) {
                w -= Scalar(T(j - 1, j)) * V.col(j - 1);
            }
            double alpha = std::real(Scalar(V.col(j).adjoint() * w));
            T(j, j) = alpha;
            w -= Scalar(alpha) * V.col(j);
            reorthogonalize(w, j + 1);
            double beta = w.norm();
            if (beta < 1e-13 * std::max(1.0, std::abs(alpha))) {
                breakdown = true;  // exact invariant subspace
                s = j + 1;
                beta_last = 0.0;
                break;
            }
            T(j, j + 1) = T(j + 1, j) = beta;
            V.col(j + 1) = w / beta;
            beta_last = beta;
            s = j + 1;
        }

        // Rayleigh-Ritz on the filled block.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(s, s));
        ritz = es.eigenvalues();
        ritz_vecs = es.eigenvectors();

        int avail = std::min<int>(n_eigs, s);
        double max_res = 0.0;
        for (int i = 0; i < avail; ++i) {
            double res = breakdown ? 0.0 : std::abs(beta_last * ritz_vecs(s - 1, i));
            max_res = std::max(max_res, res);
        }
        bool complete = (s >= dim);  // Krylov space spans everything reachable
        bool done = (avail == n_eigs) &&
                    (breakdown || complete ||
                     max_res <= opts.tol * std::max(1.0, std::abs(ritz(0))));
        bool out_of_budget = total_iter >= opts.max_total_iter;
        if (done || out_of_budget) {
            if (avail < n_eigs) throw ConvergenceError("Krylov space exhausted below n_eigs");
            out.values = ritz.head(n_eigs);
            out.vectors = V.leftCols(s) *
                          ritz_vecs.leftCols(n_eigs).eval().template cast<Scalar>().eval();
            for (int i = 0; i < n_eigs; ++i) out.vectors.col(i).normalize();
            out.iterations = total_iter;
            out.max_residual = max_res;
            out.converged = done;
            if (!done && out_of_budget)
                throw ConvergenceError("Lanczos did not converge within max iterations");
            return out;
        }
        if (breakdown)  // invariant subspace smaller than the request
            throw ConvergenceError("Krylov space exhausted below n_eigs");

        // Thick restart: keep the lowest block plus the residual direction.
        int k = std::min({s - 1, n_eigs + 8});
        Mat kept_vecs = V.leftCols(s) * ritz_vecs.leftCols(k).cast<double>().eval().template cast<Scalar>().eval();
        Vec resid = V.col(s);  // next Lanczos vector, untouched by the rotation
        Eigen::VectorXd couplings(k);
        for (int i = 0; i < k; ++i) couplings(i) = beta_last * ritz_vecs(s - 1, i);
        V.leftCols(k) = kept_vecs;
        V.col(k) = resid;
        T.setZero();
        for (int i = 0; i < k; ++i) {
            T(i, i) = ritz(i);
            T(i, k) = T(k, i) = couplings(i);
        }
        kept = k;
        s = k;
    }
}

template <class Scalar>
EigenPairs<Scalar> lanczos_lowest(const Eigen::SparseMatrix<Scalar, Eigen::RowMajor>& mat,
                                  LanczosOptions opts = {}) {
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    return lanczos_lowest<Scalar>(
        [&mat](const Vec& x, Vec& y) { y.noalias() = mat * x; }, mat.rows(), opts);
}

// Dense spectrum for cross-checks (dimension guarded by the caller).
template <class Scalar>
Eigen::VectorXd dense_spectrum(const Eigen::SparseMatrix<Scalar, Eigen::RowMajor>& mat) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense = mat;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(dense);
    return es.eigenvalues();
}

struct GroundStateResult {
    double energy = 0.0;
    Eigen::VectorXcd vector;
    int iterations = 0;
    double residual = 0.0;
    bool dense_path = false;
};

GroundStateResult ground_state(const SparseHamiltonian& h, double tol = 1e-10);
GroundStateResult ground_state(const SparseHamiltonianReal& h, double tol = 1e-10);

}  // namespace schwinger
