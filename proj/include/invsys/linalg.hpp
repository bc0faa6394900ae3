#pragma once

// Dense exact linear algebra over the coefficient field (RatFun values) plus
// univariate polynomial helpers over the same field. Everything here is
// fraction-free in spirit only: RatFun division is exact, so plain Gaussian
// elimination stays correct.

#include "invsys/ratfun.hpp"

#include <optional>
#include <vector>

namespace invsys {

using Vec = std::vector<RatFun>;

class Matrix {
public:
    Matrix(int rows, int cols, int fnv)
        : r_(rows), c_(cols), fnv_(fnv), a_(rows, Vec(cols, RatFun(fnv))) {}

    static Matrix identity(int n, int fnv) {
        Matrix m(n, n, fnv);
        for (int i = 0; i < n; ++i) m.at(i, i) = RatFun(fnv, 1);
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    int field_nvars() const { return fnv_; }
    RatFun& at(int i, int j) { return a_[i][j]; }
    const RatFun& at(int i, int j) const { return a_[i][j]; }
    const Vec& row(int i) const { return a_[i]; }

    Matrix transpose() const {
        Matrix t(c_, r_, fnv_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) t.at(j, i) = a_[i][j];
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix m(a.r_, b.c_, a.fnv_);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                if (a.at(i, k).is_zero()) continue;
                for (int j = 0; j < b.c_; ++j)
                    m.at(i, j) += a.at(i, k) * b.at(k, j);
            }
        return m;
    }
    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        Matrix m = a;
        for (int i = 0; i < a.r_; ++i)
            for (int j = 0; j < a.c_; ++j) m.at(i, j) += b.at(i, j);
        return m;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        Matrix m = a;
        for (int i = 0; i < a.r_; ++i)
            for (int j = 0; j < a.c_; ++j) m.at(i, j) -= b.at(i, j);
        return m;
    }
    friend Matrix operator*(const RatFun& c, const Matrix& a) {
        Matrix m = a;
        for (int i = 0; i < a.r_; ++i)
            for (int j = 0; j < a.c_; ++j) m.at(i, j) *= c;
        return m;
    }
    bool operator==(const Matrix& o) const {
        return r_ == o.r_ && c_ == o.c_ && a_ == o.a_;
    }

    Vec apply(const Vec& v) const {
        Vec out(r_, RatFun(fnv_));
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j)
                if (!a_[i][j].is_zero() && !v[j].is_zero()) out[i] += a_[i][j] * v[j];
        return out;
    }

    RatFun trace() const {
        RatFun t(fnv_);
        for (int i = 0; i < r_; ++i) t += a_[i][i];
        return t;
    }

    // reduced row echelon form in place; returns pivot column indices
    std::vector<int> rref() {
        std::vector<int> pivots;
        int row = 0;
        for (int col = 0; col < c_ && row < r_; ++col) {
            int p = -1;
            for (int i = row; i < r_; ++i)
                if (!a_[i][col].is_zero()) { p = i; break; }
            if (p < 0) continue;
            std::swap(a_[row], a_[p]);
            RatFun inv = RatFun(fnv_, 1) / a_[row][col];
            for (int j = 0; j < c_; ++j) a_[row][j] *= inv;
            for (int i = 0; i < r_; ++i) {
                if (i == row || a_[i][col].is_zero()) continue;
                RatFun f = a_[i][col];
                for (int j = 0; j < c_; ++j) a_[i][j] -= f * a_[row][j];
            }
            pivots.push_back(col);
            ++row;
        }
        return pivots;
    }

    int rank() const {
        Matrix m = *this;
        return (int)m.rref().size();
    }

    // basis of {v : A v = 0}
    std::vector<Vec> kernel() const {
        Matrix m = *this;
        std::vector<int> piv = m.rref();
        std::vector<bool> is_piv(c_, false);
        for (int p : piv) is_piv[p] = true;
        std::vector<Vec> basis;
        for (int free = 0; free < c_; ++free) {
            if (is_piv[free]) continue;
            Vec v(c_, RatFun(fnv_));
            v[free] = RatFun(fnv_, 1);
            for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m.at((int)r, free);
            basis.push_back(v);
        }
        return basis;
    }

    // one solution of A x = b, if any
    std::optional<Vec> solve(const Vec& b) const {
        Matrix aug(r_, c_ + 1, fnv_);
        for (int i = 0; i < r_; ++i) {
            for (int j = 0; j < c_; ++j) aug.at(i, j) = a_[i][j];
            aug.at(i, c_) = b[i];
        }
        std::vector<int> piv = aug.rref();
        if (!piv.empty() && piv.back() == c_) return std::nullopt;
        Vec x(c_, RatFun(fnv_));
        for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug.at((int)r, c_);
        return x;
    }

    // characteristic polynomial det(tI - A), monic, coefficient of t^k at [k]
    Vec char_poly() const {
        int n = r_;
        Vec c(n + 1, RatFun(fnv_));
        c[n] = RatFun(fnv_, 1);
        Matrix M = identity(n, fnv_);
        for (int k = 1; k <= n; ++k) {
            M = *this * M;
            RatFun ck = -(M.trace() / RatFun(fnv_, k));
            c[n - k] = ck;
            for (int i = 0; i < n; ++i) M.at(i, i) += ck;
        }
        return c;
    }

private:
    int r_, c_, fnv_;
    std::vector<Vec> a_;
};

// stack rows of several matrices / row vectors and return a row basis
inline Matrix from_rows(const std::vector<Vec>& rows, int cols, int fnv) {
    Matrix m((int)rows.size(), cols, fnv);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < cols; ++j) m.at((int)i, j) = rows[i][j];
    return m;
}

inline std::vector<Vec> row_basis(const std::vector<Vec>& rows, int cols, int fnv) {
    Matrix m = from_rows(rows, cols, fnv);
    std::vector<int> piv = m.rref();
    std::vector<Vec> out;
    for (size_t r = 0; r < piv.size(); ++r) out.push_back(m.row((int)r));
    return out;
}

// does v lie in the span of the rows?
inline bool in_row_span(const std::vector<Vec>& rows, const Vec& v, int fnv) {
    int cols = (int)v.size();
    std::vector<Vec> all = rows;
    size_t before = row_basis(all, cols, fnv).size();
    all.push_back(v);
    return row_basis(all, cols, fnv).size() == before;
}

// --------------------------------------------------------------------------
// univariate polynomials over the field, dense coefficient vectors, [k] = t^k

using UPoly = Vec;

inline int up_deg(const UPoly& p) {
    for (int i = (int)p.size() - 1; i >= 0; --i)
        if (!p[i].is_zero()) return i;
    return -1;
}

inline UPoly up_trim(UPoly p) {
    p.resize(up_deg(p) + 1);
    return p;
}

inline UPoly up_mul(const UPoly& a, const UPoly& b, int fnv) {
    int da = up_deg(a), db = up_deg(b);
    if (da < 0 || db < 0) return {};
    UPoly r(da + db + 1, RatFun(fnv));
    for (int i = 0; i <= da; ++i)
        for (int j = 0; j <= db; ++j) r[i + j] += a[i] * b[j];
    return r;
}

// quotient and remainder of a by b (b nonzero)
inline std::pair<UPoly, UPoly> up_divmod(UPoly a, const UPoly& b, int fnv) {
    int db = up_deg(b);
    UPoly q(std::max(0, up_deg(a) - db + 1), RatFun(fnv));
    while (up_deg(a) >= db) {
        int da = up_deg(a);
        RatFun f = a[da] / b[db];
        q[da - db] = f;
        for (int i = 0; i <= db; ++i) a[da - db + i] -= f * b[i];
    }
    return {up_trim(q), up_trim(a)};
}

inline UPoly up_monic(UPoly p, int fnv) {
    int d = up_deg(p);
    if (d < 0) return {};
    RatFun inv = RatFun(fnv, 1) / p[d];
    for (auto& c : p) c *= inv;
    return up_trim(p);
}

inline UPoly up_gcd(UPoly a, UPoly b, int fnv) {
    a = up_trim(a);
    b = up_trim(b);
    while (up_deg(b) >= 0) {
        UPoly r = up_divmod(a, b, fnv).second;
        a = std::move(b);
        b = std::move(r);
    }
    return up_monic(a, fnv);
}

inline UPoly up_derivative(const UPoly& p, int fnv) {
    if (p.size() <= 1) return {};
    UPoly d(p.size() - 1, RatFun(fnv));
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = RatFun(fnv, (int)i) * p[i];
    return up_trim(d);
}

inline UPoly up_squarefree(const UPoly& p, int fnv) {
    UPoly d = up_derivative(p, fnv);
    if (up_deg(d) < 0) return up_monic(p, fnv);
    UPoly g = up_gcd(p, d, fnv);
    if (up_deg(g) <= 0) return up_monic(p, fnv);
    return up_divmod(up_monic(p, fnv), g, fnv).first;
}

inline RatFun up_eval(const UPoly& p, const RatFun& x, int fnv) {
    RatFun r(fnv);
    for (int i = up_deg(p); i >= 0; --i) r = r * x + p[i];
    return r;
}

} // namespace invsys
