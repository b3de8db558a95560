#include "rumorsim/trajectory.hpp"

#include <cstdio>

#include "rumorsim/error.hpp"

namespace rumorsim {

namespace {

std::string g17(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

nlohmann::ordered_json to_json(StepRecord const& r)
{
    return nlohmann::ordered_json{
        {"step", r.step},
        {"mean_opinion", r.mean_opinion},
        {"histogram", r.histogram},
        {"core_count", r.core_ids.size()},
        {"core_ids", r.core_ids},
        {"beliefs",
         {{"disbelief", r.beliefs[0]}, {"uncertainty", r.beliefs[1]}, {"certainty", r.beliefs[2]}}},
        {"driver_calls", r.driver_calls},
        {"events", r.events},
        {"interventions", r.interventions},
    };
}

std::string summary_row(StepRecord const& r)
{
    return std::to_string(r.step) + ',' + g17(r.mean_opinion) + ',' + std::to_string(r.core_ids.size()) + ','
           + std::to_string(r.beliefs[0]) + ',' + std::to_string(r.beliefs[1]) + ',' + std::to_string(r.beliefs[2])
           + ',' + std::to_string(r.driver_calls);
}

OpinionSeries mean_series(std::span<StepRecord const> records)
{
    OpinionSeries s;
    for (auto const& r : records) {
        s.steps.push_back(r.step);
        s.values.push_back(r.mean_opinion);
    }
    return s;
}

TrajectoryWriter::TrajectoryWriter(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
    jsonl_.open(dir_ / "trajectory.jsonl", std::ios::trunc);
    csv_.open(dir_ / "summary.csv", std::ios::trunc);
    if (!jsonl_ || !csv_) {
        throw ConfigError("cannot write outputs in " + dir_.string());
    }
    csv_ << kSummaryHeader << '\n' << std::flush;
}

void TrajectoryWriter::write(StepRecord const& record)
{
    jsonl_ << to_json(record).dump() << '\n' << std::flush;
    csv_ << summary_row(record) << '\n' << std::flush;
}

void TrajectoryWriter::finish(std::span<double const> final_opinions)
{
    write_opinions(dir_ / "final_opinions.txt", final_opinions);
}

void write_opinions(std::filesystem::path const& path, std::span<double const> opinions)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    for (double o : opinions) {
        out << g17(o) << '\n';
    }
}

}  // namespace rumorsim
