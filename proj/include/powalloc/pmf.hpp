// Finite probability mass function over consecutive integers starting at 0.
// Channel distributions reuse the same type with position k standing for
// channel index k+1.
#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace powalloc {

class Pmf {
public:
    // Absolute tolerance on the probability sum. Inputs outside it are
    // rejected at construction instead of being silently renormalized.
    static constexpr double kSumTolerance = 1e-9;

    Pmf() = default;

    explicit Pmf(std::vector<double> probabilities) : p_(std::move(probabilities)) {
        if (p_.empty()) throw std::invalid_argument("pmf must have at least one entry");
        double sum = 0.0;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            if (!(p_[i] >= 0.0)) {
                std::ostringstream msg;
                msg << "pmf entry " << i << " is negative or non-finite (" << p_[i] << ")";
                throw std::invalid_argument(msg.str());
            }
            sum += p_[i];
        }
        if (sum < 1.0 - kSumTolerance || sum > 1.0 + kSumTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "pmf entries sum to " << sum << ", expected 1 within " << kSumTolerance;
            throw std::invalid_argument(msg.str());
        }
    }

    // Builds a pmf proportional to the given non-negative weights.
    static Pmf from_weights(const std::vector<double>& weights) {
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("pmf weight is negative or non-finite");
            sum += w;
        }
        if (sum <= 0.0) throw std::invalid_argument("pmf weights sum to zero");
        std::vector<double> p(weights.size());
        for (std::size_t i = 0; i < weights.size(); ++i) p[i] = weights[i] / sum;
        return Pmf(std::move(p));
    }

    bool empty() const { return p_.empty(); }
    int size() const { return static_cast<int>(p_.size()); }
    double operator[](int i) const { return p_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& probabilities() const { return p_; }

    // Largest value with positive support index semantics: size()-1.
    int max_index() const { return size() - 1; }

    double mean() const {
        double m = 0.0;
        for (int i = 0; i < size(); ++i) m += static_cast<double>(i) * p_[static_cast<std::size_t>(i)];
        return m;
    }

    // P{value >= i}; 0 for i > max_index, full mass for i <= 0.
    double tail_from(int i) const {
        if (i <= 0) i = 0;
        double t = 0.0;
        for (int k = i; k < size(); ++k) t += p_[static_cast<std::size_t>(k)];
        return t;
    }

    // Cumulative table for inverse-CDF sampling; last entry forced to 1 so
    // every u in [0,1) maps to a valid index.
    std::vector<double> cumulative() const {
        std::vector<double> c(p_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            acc += p_[i];
            c[i] = acc;
        }
        if (!c.empty()) c.back() = 1.0;
        return c;
    }

private:
    std::vector<double> p_;
};

// Inverse-CDF lookup: smallest index k with u <= cdf[k]. A draw exactly on a
// boundary resolves to the lower index.
inline int sample_index(const std::vector<double>& cdf, double u) {
    for (std::size_t k = 0; k < cdf.size(); ++k) {
        if (u <= cdf[k]) return static_cast<int>(k);
    }
    return static_cast<int>(cdf.size()) - 1;
}

} // namespace powalloc
