#pragma once

#include <cstdint>
#include <stdexcept>

namespace hardrods {

// Error-free transformation: a + b == s + e exactly (round-to-nearest).
inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    double bv = s - a;
    double av = s - bv;
    e = (a - av) + (b - bv);
}

// Exact accumulator for sums of doubles, kept as a Shewchuk-style
// nonoverlapping expansion. The represented value is the exact real sum of
// everything added, so two accumulations of the same multiset round to the
// same double no matter in which order the terms arrived. The flux kernels
// depend on this to stay bit-for-bit interchangeable.
//
// Requires round-to-nearest arithmetic; do not build with -ffast-math.
class ExactSum {
public:
    static constexpr int kCapacity = 28;

    void clear() { n_ = 0; }
    bool empty() const { return n_ == 0; }

    void add(double x) {
        if (x == 0.0) return;
        if (n_ + 1 >= kCapacity) {
            compress();
            if (n_ + 1 >= kCapacity)
                throw std::overflow_error("ExactSum: expansion exceeded capacity");
        }
        double q = x;
        int out = 0;
        for (int i = 0; i < n_; ++i) {
            double s, e;
            two_sum(q, c_[i], s, e);
            if (e != 0.0) c_[out++] = e;
            q = s;
        }
        c_[out++] = q;
        n_ = out;
    }

    void add(const ExactSum& o) {
        for (int i = 0; i < o.n_; ++i) add(o.c_[i]);
    }

    void add_negated(const ExactSum& o) {
        for (int i = 0; i < o.n_; ++i) add(-o.c_[i]);
    }

    // Rounded value of the exact sum. One approximation pass plus exact
    // residual refinements; the result depends only on the represented value.
    double value() const {
        ExactSum t = *this;
        t.compress();
        double v = t.approx();
        for (int pass = 0; pass < 4; ++pass) {
            ExactSum r = t;
            r.add(-v);
            r.compress();
            double d = r.approx();
            if (d == 0.0) break;
            v += d;
        }
        return v;
    }

private:
    double approx() const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += c_[i];
        return s;
    }

    // Two-pass compression (down then up); value-preserving, usually shrinks
    // the expansion to a couple of components.
    void compress() {
        if (n_ <= 1) return;
        double g[kCapacity];
        int bot = n_ - 1;
        double q = c_[n_ - 1];
        for (int i = n_ - 2; i >= 0; --i) {
            double s, e;
            two_sum(q, c_[i], s, e);
            if (e != 0.0) {
                g[bot--] = s;
                q = e;
            } else {
                q = s;
            }
        }
        g[bot] = q;

        int out = 0;
        q = g[bot];
        for (int i = bot + 1; i < n_; ++i) {
            double s, e;
            two_sum(g[i], q, s, e);
            if (e != 0.0) c_[out++] = e;
            q = s;
        }
        c_[out++] = q;
        n_ = out;
    }

    double c_[kCapacity];
    int n_ = 0;
};

} // namespace hardrods
