#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taskforge/config/session_config.hpp"
#include "taskforge/telemetry/log_record.hpp"
#include "taskforge/util/expected.hpp"

namespace taskforge::analysis {

using telemetry::LogRecord;

// ---- placement heatmap ----------------------------------------------------

struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<long> counts;  // row-major, counts[y * width + x]

  long at(int x, int y) const { return counts[static_cast<std::size_t>(y * width + x)]; }
  long total() const;
};

struct HeatmapResult {
  Heatmap heatmap;
  long buys = 0;                      // BUY records inside the map
  std::vector<std::string> excluded;  // one note per out-of-bounds BUY
};

/// Counts BUY records per cell; SELL does not decrement.
HeatmapResult placement_heatmap(const std::vector<LogRecord>& records, int width, int height);

// ---- expenditure ----------------------------------------------------------

struct RoundSummary {
  std::string room;
  int level = 0;  // 1-based
  int round = 0;  // 1-based
  std::int64_t starting_gold = 0;
  std::int64_t spent = 0;  // purchases and upgrades
  std::int64_t refunds = 0;
  std::int64_t bounties = 0;
  std::int64_t unspent = 0;
  long buys = 0;
  long sells = 0;
  long upgrades = 0;
  long kills = 0;
  long leaks = 0;
  std::int64_t points = 0;
  std::int64_t final_health = 0;
  double score = 0.0;
  long chats = 0;
  std::string outcome;  // from the round result, empty when absent
  bool complete = false;  // both boundaries seen
  std::optional<std::int64_t> reported_unspent;
  bool mismatch = false;  // reconstruction disagrees with the round result
  std::vector<std::string> notes;
};

/// Rebuilds each round's money from the log and the config catalog: unspent = start - buys - upgrades
/// + refunds + bounties, with discounts from the DISCOUNT towers on the reconstructed board.
std::vector<RoundSummary> expenditure_series(const std::vector<LogRecord>& records, const SessionConfig& config,
                                             std::string room = "");

// ---- chat -------------------------------------------------------------------

struct UtteranceStats {
  long utterances = 0;
  long vocabulary = 0;
  double mean_tokens = 0.0;
};

/// Maximal runs of non-whitespace.
std::vector<std::string> tokenize(std::string_view text);
UtteranceStats utterance_stats(const std::vector<LogRecord>& records);

enum class Skill : std::uint8_t {
  MaintainingCommunication,
  SharingInformation,
  EstablishingSharedUnderstanding,
  Negotiating,
  RepresentingFormulating,
  Planning,
  ExecutingActions,
  Monitoring,
};

/// Table order: social skills, then cognitive.
inline constexpr std::array<Skill, 8> kSkills = {
    Skill::MaintainingCommunication, Skill::SharingInformation,     Skill::EstablishingSharedUnderstanding,
    Skill::Negotiating,              Skill::RepresentingFormulating, Skill::Planning,
    Skill::ExecutingActions,         Skill::Monitoring};

std::string_view skill_id(Skill s);     // "SHARING_INFORMATION"
std::string_view skill_label(Skill s);  // "Sharing information"
std::string_view dimension(Skill s);    // "Social" or "Cognitive"
/// Accepts the id or the label, case-insensitively.
std::optional<Skill> parse_skill(std::string_view s);

/// Utterance index (0-based, into the CHAT records of the log) to its skills.
struct AnnotationSet {
  std::vector<std::pair<int, std::vector<Skill>>> entries;
};

struct AnnotationIssue {
  int line = 0;
  std::string message;
};

/// One line per utterance: "index<TAB>skill[,skill...]". Blank lines and '#' comments are skipped.
Expected<AnnotationSet, std::vector<AnnotationIssue>> parse_annotations(std::string_view text);
std::string serialize_annotations(const AnnotationSet& set);

struct SkillRow {
  Skill skill;
  long count = 0;                     // utterances carrying the skill; multi-label items count once per skill
  std::optional<double> mean_tokens;  // none when count is 0
};

struct SkillSummary {
  std::vector<SkillRow> rows;  // kSkills order
  long utterances = 0;         // CHAT records in the log
  long annotated = 0;          // distinct annotated utterances
  long labels = 0;             // sum of counts
};

/// Errors on an index outside the CHAT records or a duplicated index.
Expected<SkillSummary, std::string> skill_summary(const std::vector<LogRecord>& records, const AnnotationSet& set);

/// Fraction of CHAT utterances carrying at least one of `skills`.
double skill_share(const std::vector<LogRecord>& records, const AnnotationSet& set, const std::vector<Skill>& skills);

// ---- output -----------------------------------------------------------------

/// "x,y,count" rows for every cell.
std::string heatmap_table(const Heatmap& h, char sep = ',');
std::string rounds_table(const std::vector<RoundSummary>& rounds, char sep = ',');
std::string chat_table(const UtteranceStats& stats, const SkillSummary* skills, char sep = ',');

}  // namespace taskforge::analysis
