#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rumorsim/types.hpp"

namespace rumorsim {

class Graph;

/// Mean opinion over time, steps strictly increasing.
struct OpinionSeries {
    std::vector<Step> steps;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    /// Throws DomainError when steps are not strictly increasing or a value is not finite.
    void validate() const;
    /// Steps 0, 1, ... for the given values.
    static OpinionSeries from_values(std::vector<double> values);
};

/// Mean absolute difference. Throws AlignmentError unless lengths and steps match.
double delta_bias(OpinionSeries const& sim, OpinionSeries const& real);
/// Population variance of sim - real.
double delta_div(OpinionSeries const& sim, OpinionSeries const& real);

/// Dynamic time warping with |a_i - b_j| cost, no window, total path cost.
double dtw(std::span<double const> a, std::span<double const> b);
double dtw(OpinionSeries const& a, OpinionSeries const& b);

/// Sample Pearson correlation. Throws DomainError for constant inputs or length < 2.
double pearson(std::span<double const> a, std::span<double const> b);

/// Population variance of opinions.
double polarization(std::span<double const> opinions);
/// Mean of |o_i - o_j| / 2 over edges. Throws DomainError on an edgeless graph.
double global_disagreement(std::span<double const> opinions, Graph const& g);
/// Mean over non-isolated agents of the fraction of neighbors within window.
double nci(std::span<double const> opinions, Graph const& g, double window = 0.2);

/// CSV with header `step,mean_opinion`; further columns are ignored.
OpinionSeries read_series(std::istream& in);
OpinionSeries load_series(std::string const& path);
void write_series(std::ostream& out, OpinionSeries const& series);

}  // namespace rumorsim
