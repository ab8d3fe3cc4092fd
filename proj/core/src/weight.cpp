#include "unitmark/weight.hpp"

#include <algorithm>
#include <cmath>

#include "unitmark/errors.hpp"

namespace unitmark {

WeightFunction WeightFunction::named(const std::string& id) {
    if (id == "identity") return WeightFunction(Kind::Identity, id);
    if (id == "bounded") {
        WeightFunction w(Kind::Bounded, id);
        w.lipschitz_ = 1.0; // sup |d/du u/(1+u^2)| = 1 at u = 0
        return w;
    }
    if (id == "one" || id == "zero") {
        WeightFunction w(id == "one" ? Kind::One : Kind::Zero, id);
        w.lipschitz_ = 0.0;
        return w;
    }
    throw ConfigError("unknown weight function id: " + id);
}

WeightFunction WeightFunction::from_table(std::vector<std::pair<double, double>> nodes) {
    if (nodes.size() < 2) throw ConfigError("weight table needs at least 2 nodes");
    std::sort(nodes.begin(), nodes.end());
    WeightFunction w(Kind::Table, "table");
    double lip = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!std::isfinite(nodes[i].first) || !std::isfinite(nodes[i].second))
            throw ConfigError("weight table nodes must be finite");
        if (i > 0) {
            const double du = nodes[i].first - nodes[i - 1].first;
            if (!(du > 0.0)) throw ConfigError("weight table abscissae must be strictly ascending");
            lip = std::max(lip, std::abs(nodes[i].second - nodes[i - 1].second) / du);
        }
        w.table_u_.push_back(nodes[i].first);
        w.table_g_.push_back(nodes[i].second);
    }
    if (!std::isfinite(lip)) throw ConfigError("weight table Lipschitz constant is not finite");
    w.lipschitz_ = lip;
    return w;
}

double WeightFunction::operator()(double u) const {
    switch (kind_) {
        case Kind::Identity: return u;
        case Kind::Bounded: return u / (1.0 + u * u);
        case Kind::One: return 1.0;
        case Kind::Zero: return 0.0;
        case Kind::Table: {
            if (u <= table_u_.front()) return table_g_.front();
            if (u >= table_u_.back()) return table_g_.back();
            const auto it = std::upper_bound(table_u_.begin(), table_u_.end(), u);
            const std::size_t hi = static_cast<std::size_t>(it - table_u_.begin());
            const std::size_t lo = hi - 1;
            const double frac = (u - table_u_[lo]) / (table_u_[hi] - table_u_[lo]);
            return table_g_[lo] + frac * (table_g_[hi] - table_g_[lo]);
        }
    }
    return 0.0;
}

} // namespace unitmark
