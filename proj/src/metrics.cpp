#include "rumorsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "rumorsim/error.hpp"
#include "rumorsim/network.hpp"

namespace rumorsim {

void OpinionSeries::validate() const
{
    if (steps.size() != values.size()) {
        throw DomainError("series: steps and values differ in length");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw DomainError("series: non-finite value at step " + std::to_string(steps[i]));
        }
        if (i > 0 && steps[i] <= steps[i - 1]) {
            throw DomainError("series: steps must be strictly increasing");
        }
    }
}

OpinionSeries OpinionSeries::from_values(std::vector<double> values)
{
    OpinionSeries s;
    s.steps.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.steps[i] = static_cast<Step>(i);
    }
    s.values = std::move(values);
    return s;
}

namespace {

void check_aligned(OpinionSeries const& a, OpinionSeries const& b)
{
    if (a.size() != b.size()) {
        throw AlignmentError("series lengths differ (" + std::to_string(a.size()) + " vs " + std::to_string(b.size())
                             + ")");
    }
    if (a.steps != b.steps) {
        throw AlignmentError("series steps are not aligned");
    }
    if (a.size() == 0) {
        throw AlignmentError("series are empty");
    }
}

}  // namespace

double delta_bias(OpinionSeries const& sim, OpinionSeries const& real)
{
    check_aligned(sim, real);
    double sum = 0.0;
    for (std::size_t i = 0; i < sim.size(); ++i) {
        sum += std::abs(sim.values[i] - real.values[i]);
    }
    return sum / static_cast<double>(sim.size());
}

double delta_div(OpinionSeries const& sim, OpinionSeries const& real)
{
    check_aligned(sim, real);
    std::vector<double> d(sim.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = sim.values[i] - real.values[i];
    }
    return polarization(d);
}

double dtw(std::span<double const> a, std::span<double const> b)
{
    if (a.empty() || b.empty()) {
        throw DomainError("dtw: empty series");
    }
    double const inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(b.size() + 1, inf);
    std::vector<double> cur(b.size() + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = inf;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = std::abs(a[i - 1] - b[j - 1]) + std::min({prev[j - 1], prev[j], cur[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double dtw(OpinionSeries const& a, OpinionSeries const& b) { return dtw(a.values, b.values); }

double pearson(std::span<double const> a, std::span<double const> b)
{
    if (a.size() != b.size()) {
        throw AlignmentError("pearson: lengths differ");
    }
    if (a.size() < 2) {
        throw DomainError("pearson: need at least two points");
    }
    double const n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw DomainError("pearson: correlation undefined for a constant series");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double polarization(std::span<double const> opinions)
{
    if (opinions.empty()) {
        throw DomainError("polarization: no opinions");
    }
    double mean = 0.0;
    for (double o : opinions) {
        mean += o;
    }
    mean /= static_cast<double>(opinions.size());
    double ss = 0.0;
    for (double o : opinions) {
        ss += (o - mean) * (o - mean);
    }
    return ss / static_cast<double>(opinions.size());
}

double global_disagreement(std::span<double const> opinions, Graph const& g)
{
    if (opinions.size() != g.node_count()) {
        throw InterfaceError("global_disagreement: opinion count differs from node count");
    }
    if (g.edge_count() == 0) {
        throw DomainError("global_disagreement: graph has no edges");
    }
    double sum = 0.0;
    for (AgentId i = 0; i < g.node_count(); ++i) {
        for (AgentId j : g.neighbors(i)) {
            if (i < j) {
                sum += std::abs(opinions[i] - opinions[j]) / 2.0;
            }
        }
    }
    return sum / static_cast<double>(g.edge_count());
}

double nci(std::span<double const> opinions, Graph const& g, double window)
{
    if (opinions.size() != g.node_count()) {
        throw InterfaceError("nci: opinion count differs from node count");
    }
    if (!(window > 0.0)) {
        throw DomainError("nci: window must be positive");
    }
    double sum = 0.0;
    std::size_t counted = 0;
    for (AgentId i = 0; i < g.node_count(); ++i) {
        auto const nb = g.neighbors(i);
        if (nb.empty()) {
            continue;
        }
        std::size_t agree = 0;
        for (AgentId j : nb) {
            agree += std::abs(opinions[j] - opinions[i]) <= window;
        }
        sum += static_cast<double>(agree) / static_cast<double>(nb.size());
        ++counted;
    }
    if (counted == 0) {
        throw DomainError("nci: every agent is isolated");
    }
    return sum / static_cast<double>(counted);
}

OpinionSeries read_series(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("series: empty file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "step,mean_opinion" && !line.starts_with("step,mean_opinion,")) {
        throw ConfigError("series: expected header step,mean_opinion");
    }
    OpinionSeries s;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto const comma = line.find(',');
        try {
            if (comma == std::string::npos) {
                throw std::invalid_argument(line);
            }
            std::size_t used = 0;
            auto const step_text = line.substr(0, comma);
            long long const step = std::stoll(step_text, &used);
            if (used != step_text.size()) {
                throw std::invalid_argument(line);
            }
            auto const next = line.find(',', comma + 1);
            auto const value_text = line.substr(comma + 1, next == std::string::npos ? std::string::npos : next - comma - 1);
            double const value = std::stod(value_text, &used);
            if (used != value_text.size()) {
                throw std::invalid_argument(line);
            }
            s.steps.push_back(step);
            s.values.push_back(value);
        } catch (std::exception const&) {
            throw ConfigError("series: bad row at line " + std::to_string(lineno) + ": " + line);
        }
    }
    try {
        s.validate();
    } catch (DomainError const& e) {
        throw ConfigError(e.what());
    }
    return s;
}

OpinionSeries load_series(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("series: cannot open " + path);
    }
    return read_series(in);
}

void write_series(std::ostream& out, OpinionSeries const& series)
{
    out << "step,mean_opinion\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", series.values[i]);
        out << series.steps[i] << ',' << buf << '\n';
    }
}

}  // namespace rumorsim
