#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace pcf::testing {

Matrix eval_direct(const std::vector<Matrix>& c, double lambda) {
    Matrix out = Matrix::Zero(c.front().rows(), c.front().cols());
    for (std::size_t u = 0; u < c.size(); ++u) {
        const double angle = -static_cast<double>(u) * lambda;
        out += Complex(std::cos(angle), std::sin(angle)) * c[u];
    }
    return out;
}

std::vector<Matrix> density_direct(const std::vector<Matrix>& c, int grid_size) {
    std::vector<Matrix> out;
    for (int r = 0; r < grid_size; ++r) {
        const double lambda = -std::numbers::pi + 2.0 * std::numbers::pi * r / grid_size;
        const Matrix p = eval_direct(c, lambda);
        out.push_back(p * p.adjoint());
    }
    return out;
}

Matrix ma_covariance(const std::vector<Matrix>& c, int j) {
    Matrix out = Matrix::Zero(c.front().rows(), c.front().rows());
    for (std::size_t u = 0; u + j < c.size(); ++u) out += c[u + j] * c[u].adjoint();
    return out;
}

std::vector<Matrix> bauer_factor(const std::vector<Matrix>& covariances, int order, int n_blocks) {
    const Eigen::Index k = covariances.front().rows();
    const Eigen::Index n = k * n_blocks;
    auto cov = [&](int j) -> Matrix {
        if (std::abs(j) >= static_cast<int>(covariances.size())) return Matrix::Zero(k, k);
        return j >= 0 ? covariances[j] : Matrix(covariances[-j].adjoint());
    };
    Matrix t(n, n);
    for (int a = 0; a < n_blocks; ++a) {
        for (int b = 0; b < n_blocks; ++b) t.block(a * k, b * k, k, k) = cov(a - b);
    }
    const Matrix l = Eigen::LLT<Matrix>(t).matrixL();
    std::vector<Matrix> d;
    const int last = n_blocks - 1;
    for (int u = 0; u <= order; ++u) d.push_back(l.block(last * k, (last - u) * k, k, k));
    return d;
}

NormalEquationFilter normal_equation_filter(const std::vector<Matrix>& signal_cov,
                                            const std::vector<Matrix>& noise_cov, const std::vector<Vector>& a,
                                            int horizon) {
    const Eigen::Index k = a.front().size();
    auto cov = [&](const std::vector<Matrix>& r, int j) -> Matrix {
        if (std::abs(j) >= static_cast<int>(r.size())) return Matrix::Zero(k, k);
        return j >= 0 ? r[j] : Matrix(r[-j].adjoint());
    };
    // Observation vector (x_0, x_{-1}, ..., x_{-(n-1)}); E x_{-i} x_{-l}^* = R(l - i).
    const Eigen::Index n = k * horizon;
    Matrix sigma(n, n);
    Vector c = Vector::Zero(n);
    for (int i = 0; i < horizon; ++i) {
        for (int l = 0; l < horizon; ++l) {
            sigma.block(i * k, l * k, k, k) = cov(signal_cov, l - i) + cov(noise_cov, l - i);
        }
        for (std::size_t l = 0; l < a.size(); ++l) {
            c.segment(i * k, k) += cov(signal_cov, static_cast<int>(l) - i) * a[l].conjugate();
        }
    }
    double var = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        for (std::size_t l = 0; l < a.size(); ++l) {
            var += (a[j].transpose() * cov(signal_cov, static_cast<int>(l) - static_cast<int>(j)) * a[l].conjugate())
                       .value()
                       .real();
        }
    }
    const Vector w = sigma.ldlt().solve(c);
    NormalEquationFilter out;
    for (int i = 0; i < horizon; ++i) out.h.push_back(w.segment(i * k, k).conjugate());
    out.mse = var - c.dot(w).real();
    return out;
}

double quadratic_mse(const std::vector<Vector>& a, const std::vector<Vector>& h, const std::vector<Matrix>& f,
                     const std::vector<Matrix>& g) {
    const int grid = static_cast<int>(f.size());
    auto eval = [](const std::vector<Vector>& x, double lambda) {
        Vector out = Vector::Zero(x.front().size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double angle = -static_cast<double>(j) * lambda;
            out += Complex(std::cos(angle), std::sin(angle)) * x[j];
        }
        return out;
    };
    double acc = 0.0;
    for (int r = 0; r < grid; ++r) {
        const double lambda = -std::numbers::pi + 2.0 * std::numbers::pi * r / grid;
        const Vector hv = eval(h, lambda);
        const Vector ev = eval(a, lambda) - hv;
        acc += (ev.transpose() * f[r] * ev.conjugate()).value().real();
        acc += (hv.transpose() * g[r] * hv.conjugate()).value().real();
    }
    return acc / grid;
}

std::vector<Matrix> random_lower_ma(int dim, int order, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Matrix> c;
    for (int u = 0; u <= order; ++u) {
        Matrix m(dim, dim);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                const double re = normal(rng);
                const double im = normal(rng);
                m(i, j) = Complex(re, im) * (0.5 * std::pow(0.5, u));
            }
        }
        if (u == 0) {
            for (int i = 0; i < dim; ++i) {
                for (int j = i + 1; j < dim; ++j) m(i, j) = 0.0;
                m(i, i) = 1.0 + std::abs(normal(rng));
            }
        }
        c.push_back(m);
    }
    return c;
}

std::vector<Vector> random_weights(int dim, int max_lag, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> a;
    for (int j = 0; j <= max_lag; ++j) {
        Vector v(dim);
        for (int k = 0; k < dim; ++k) {
            const double re = normal(rng);
            const double im = normal(rng);
            v(k) = Complex(re, im);
        }
        a.push_back(v);
    }
    return a;
}

double max_abs_diff(const std::vector<Matrix>& x, const std::vector<Matrix>& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, (x[i] - y[i]).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace pcf::testing
