#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include "json.hpp"

#include "rumorsim/engine.hpp"
#include "rumorsim/metrics.hpp"

namespace rumorsim {

nlohmann::ordered_json to_json(StepRecord const& record);

inline constexpr char kSummaryHeader[] = "step,mean_opinion,core_count,disbelief,uncertainty,certainty,driver_calls";

/// One summary CSV row, no newline. Means use 17 significant digits.
std::string summary_row(StepRecord const& record);

/// Mean-opinion series of a log, indexed by executed step.
OpinionSeries mean_series(std::span<StepRecord const> records);

/*!
 * Streams a run to a directory: trajectory.jsonl and summary.csv grow one
 * line per step and are flushed as they go, so an aborted run leaves every
 * completed step on disk. finish() adds final_opinions.txt.
 */
class TrajectoryWriter {
  public:
    explicit TrajectoryWriter(std::filesystem::path dir);

    void write(StepRecord const& record);
    void finish(std::span<double const> final_opinions);

    std::filesystem::path const& dir() const noexcept { return dir_; }

  private:
    std::filesystem::path dir_;
    std::ofstream jsonl_;
    std::ofstream csv_;
};

void write_opinions(std::filesystem::path const& path, std::span<double const> opinions);

}  // namespace rumorsim
