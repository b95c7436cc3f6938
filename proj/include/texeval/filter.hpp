#pragma once

#include <optional>
#include <string>
#include <vector>

#include "texeval/judge.hpp"
#include "texeval/manifest.hpp"

namespace texeval {

struct FilteredRecord {
    SampleRecord record;
    /// Lowest appearance-change score over the record's edits.
    std::optional<double> score;
    /// Set for undecided records.
    std::string error;
};

struct FilterResult {
    std::vector<FilteredRecord> kept;
    std::vector<FilteredRecord> discarded;
    std::vector<FilteredRecord> undecided;
};

/// Drops records whose edit is too slight or implausible: each edit is graded by
/// the judge (quality task) and the record is kept iff every grade is >= theta.
/// Judge errors put the record in `undecided`.
FilterResult quality_filter(const std::vector<SampleRecord>& records, JudgeBackend& judge,
                            double theta, const std::string& system_prompt = default_quality_prompt());

}  // namespace texeval
