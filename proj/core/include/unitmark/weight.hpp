#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace unitmark {

/// Weight function g applied to the normalized past path. Built-in choices
/// are globally Lipschitz; custom tables are checked for a finite Lipschitz
/// constant and extended by constant continuation outside their range.
class WeightFunction {
public:
    /// id in {"identity", "bounded", "one", "zero"}.
    static WeightFunction named(const std::string& id);

    /// Piecewise-linear interpolant through strictly ascending (u, g(u))
    /// nodes. Throws ConfigError when the implied Lipschitz constant is not
    /// finite or the nodes are not strictly ascending.
    static WeightFunction from_table(std::vector<std::pair<double, double>> nodes);

    double operator()(double u) const;
    const std::string& id() const { return id_; }
    double lipschitz_bound() const { return lipschitz_; }

private:
    enum class Kind { Identity, Bounded, One, Zero, Table };
    WeightFunction(Kind kind, std::string id) : kind_(kind), id_(std::move(id)) {}

    Kind kind_;
    std::string id_;
    double lipschitz_ = 1.0;
    std::vector<double> table_u_;
    std::vector<double> table_g_;
};

} // namespace unitmark
