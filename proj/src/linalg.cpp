#include "adaptsim/linalg.hpp"

#include <cassert>
#include <cmath>
#include <algorithm>

namespace adaptsim {

double dot(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double nrm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double inf_norm(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

Vec operator+(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec operator*(double s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

void axpy(double s, const Vec& x, Vec& y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const Vec& d) {
    Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

Vec Mat::operator*(const Vec& v) const {
    assert(static_cast<int>(v.size()) == cols_);
    Vec r(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat Mat::operator+(const Mat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

Mat Mat::operator-(const Mat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
}

Mat Mat::operator*(double s) const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = s * a_[i];
    return r;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
}

double Mat::asymmetry() const {
    assert(rows_ == cols_);
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j) m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
}

void Mat::symmetrize() {
    assert(rows_ == cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j) {
            const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
            (*this)(i, j) = v;
            (*this)(j, i) = v;
        }
}

std::optional<Mat> cholesky(const Mat& a) {
    assert(a.rows() == a.cols());
    const int n = a.rows();
    Mat l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

Vec chol_solve(const Mat& l, const Vec& b) {
    const int n = l.rows();
    assert(static_cast<int>(b.size()) == n);
    Vec y(n), x(n);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

double quad_form_inv(const Mat& l, const Vec& v) {
    // v'A^{-1}v = ||L^{-1}v||^2
    const int n = l.rows();
    Vec y(n);
    for (int i = 0; i < n; ++i) {
        double s = v[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    return dot(y, y);
}

Vec jacobi_eigenvalues(Mat a, int max_sweeps) {
    assert(a.rows() == a.cols());
    const int n = a.rows();
    if (n == 1) return {a(0, 0)};
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off += std::fabs(a(p, q));
        if (off == 0.0) break;
        const double thresh = (sweep < 3) ? 0.2 * off / (n * n) : 0.0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                const double scale = 100.0 * std::fabs(apq);
                if (sweep > 3 && std::fabs(a(p, p)) + scale == std::fabs(a(p, p)) &&
                    std::fabs(a(q, q)) + scale == std::fabs(a(q, q))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                if (std::fabs(apq) <= thresh) continue;
                const double h = a(q, q) - a(p, p);
                double t;
                if (std::fabs(h) + scale == std::fabs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double hpq = t * apq;
                a(p, p) -= hpq;
                a(q, q) += hpq;
                a(p, q) = a(q, p) = 0.0;
                auto rotate = [&](int i, int j, int k, int l2) {
                    const double g = a(i, j);
                    const double hh = a(k, l2);
                    a(i, j) = g - s * (hh + g * tau);
                    a(k, l2) = hh + s * (g - hh * tau);
                };
                // classic sweep pattern: only the upper triangle is touched
                for (int j = 0; j < p; ++j) rotate(j, p, j, q);
                for (int j = p + 1; j < q; ++j) rotate(p, j, j, q);
                for (int j = q + 1; j < n; ++j) rotate(p, j, q, j);
            }
        }
    }
    Vec ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace adaptsim
