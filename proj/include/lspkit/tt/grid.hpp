#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lspkit/util/error.hpp"

namespace lspkit {

/// Uniform rectangular grid, endpoints inclusive.
class Grid {
public:
    Grid() = default;

    Grid(std::vector<double> lower, std::vector<double> upper, std::vector<std::size_t> count)
        : lower_(std::move(lower)), upper_(std::move(upper)), count_(std::move(count)) {
        if (lower_.empty() || lower_.size() != upper_.size() || lower_.size() != count_.size()) {
            throw ConfigError("grid: bounds and counts must be non-empty and of equal length");
        }
        for (std::size_t k = 0; k < lower_.size(); ++k) {
            if (!(lower_[k] < upper_[k]) || !std::isfinite(lower_[k]) || !std::isfinite(upper_[k])) {
                throw ConfigError("grid: lower < upper violated in dimension " + std::to_string(k));
            }
            if (count_[k] < 2) {
                throw ConfigError("grid: need at least 2 points in dimension " + std::to_string(k));
            }
        }
    }

    std::size_t dims() const { return count_.size(); }
    std::size_t count(std::size_t k) const { return count_[k]; }
    double lower(std::size_t k) const { return lower_[k]; }
    double upper(std::size_t k) const { return upper_[k]; }
    const std::vector<double>& lowers() const { return lower_; }
    const std::vector<double>& uppers() const { return upper_; }
    const std::vector<std::size_t>& counts() const { return count_; }

    double spacing(std::size_t k) const {
        return (upper_[k] - lower_[k]) / static_cast<double>(count_[k] - 1);
    }

    double point(std::size_t k, std::size_t i) const {
        if (i + 1 == count_[k]) {
            return upper_[k];
        }
        return lower_[k] + spacing(k) * static_cast<double>(i);
    }

    bool contains(std::size_t k, double x) const {
        const double tol = 1e-12 * (upper_[k] - lower_[k]);
        return x >= lower_[k] - tol && x <= upper_[k] + tol;
    }

    /// Cell containing x in dimension k: returns the left node index i and
    /// the weight t of node i+1, so x = (1-t)*point(i) + t*point(i+1).
    void locate(std::size_t k, double x, std::size_t& i, double& t) const {
        if (!contains(k, x)) {
            throw DomainError("point coordinate " + std::to_string(x) + " outside [" +
                              std::to_string(lower_[k]) + ", " + std::to_string(upper_[k]) +
                              "] in dimension " + std::to_string(k));
        }
        const double u = (x - lower_[k]) / spacing(k);
        const double last = static_cast<double>(count_[k] - 2);
        double f = std::floor(u);
        if (f < 0.0) {
            f = 0.0;
        }
        if (f > last) {
            f = last;
        }
        i = static_cast<std::size_t>(f);
        t = u - f;
        if (t < 0.0) {
            t = 0.0;
        }
        if (t > 1.0) {
            t = 1.0;
        }
        // snap round-off so grid nodes hit a single core slice
        if (t < 1e-12) {
            t = 0.0;
        } else if (t > 1.0 - 1e-12) {
            t = 1.0;
        }
    }

    bool operator==(const Grid&) const = default;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<std::size_t> count_;
};

} // namespace lspkit
