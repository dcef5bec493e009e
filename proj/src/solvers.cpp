#include "schwinger/solvers.hpp"

namespace schwinger {

namespace {

template <class Scalar>
GroundStateResult ground_state_impl(const Eigen::SparseMatrix<Scalar, Eigen::RowMajor>& mat,
                                    double tol, int dense_dim) {
    if (tol <= 0) throw ValidationError("tolerance must be > 0");
    GroundStateResult r;
    const std::int64_t dim = mat.rows();
    if (dim <= dense_dim) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense = mat;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(dense);
        r.energy = es.eigenvalues()(0);
        r.vector = es.eigenvectors().col(0).template cast<std::complex<double>>();
        r.dense_path = true;
    } else {
        LanczosOptions opts;
        opts.tol = tol;
        auto pairs = lanczos_lowest<Scalar>(mat, opts);
        r.energy = pairs.values(0);
        r.vector = pairs.vectors.col(0).template cast<std::complex<double>>();
        r.iterations = pairs.iterations;
    }
    Eigen::VectorXcd hv(dim);
    if constexpr (std::is_same_v<Scalar, double>) {
        Eigen::VectorXd re = mat * r.vector.real().eval();
        Eigen::VectorXd im = mat * r.vector.imag().eval();
        hv.real() = re;
        hv.imag() = im;
    } else {
        hv = mat * r.vector;
    }
    r.residual = (hv - r.energy * r.vector).norm();
    if (r.residual > tol * std::max(1.0, std::abs(r.energy)) * 10)
        throw ConvergenceError("ground-state residual above tolerance");
    return r;
}

}  // namespace

GroundStateResult ground_state(const SparseHamiltonian& h, double tol) {
    LanczosOptions defaults;
    return ground_state_impl(h.mat, tol, defaults.dense_fallback_dim);
}

GroundStateResult ground_state(const SparseHamiltonianReal& h, double tol) {
    LanczosOptions defaults;
    return ground_state_impl(h.mat, tol, defaults.dense_fallback_dim);
}

}  // namespace schwinger
