#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texeval/scoring.hpp"

namespace texeval {

/// One benchmark unit: a source image, one edited image per model, the
/// instruction, and optionally precomputed structure inputs and a human ranking.
///
/// Paths are kept exactly as written in the manifest; `resolve` anchors relative
/// ones at the manifest's directory.
struct SampleRecord {
    std::string sample_id;
    Subtask subtask = Subtask::TextureReplacement;
    std::string instruction;
    std::string src;
    std::map<std::string, std::string> edits;
    /// External structure maps; filled from the naming convention when absent.
    std::optional<std::string> src_struct;
    std::map<std::string, std::string> edit_structs;
    /// Precomputed raw similarity per model; bypasses extraction when present.
    std::map<std::string, double> struct_scores;
    /// Best first. Three distinct models drawn from `edits`.
    std::optional<std::vector<std::string>> human_ranking;

    std::filesystem::path base_dir;

    [[nodiscard]] std::filesystem::path resolve(const std::string& path) const;
    [[nodiscard]] std::vector<std::string> models() const;
};

/// Parses one manifest line; `lineno` only feeds error messages.
/// Checks field types and the record invariants, not file existence.
SampleRecord parse_manifest_line(std::string_view line, int lineno,
                                 const std::filesystem::path& base_dir = {});

/// Single-line JSON with a fixed key order.
std::string serialize_record(const SampleRecord& record);

/// Loads a line-delimited manifest, auto-discovers `<sample_id>.src.struct.png` and
/// `<sample_id>[.<model>].edit.struct.png` next to the manifest, and verifies every
/// referenced file. Throws ParseError (with line number) or MissingFile (every absent path).
std::vector<SampleRecord> load_manifest(const std::filesystem::path& path);

void save_manifest(const std::filesystem::path& path, const std::vector<SampleRecord>& records);

}  // namespace texeval
