#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tetun/corpus.hpp"

namespace tetun {

inline constexpr int max_grade = 3;
inline constexpr std::size_t default_votes_per_pair = 5;
inline constexpr std::size_t second_round_votes = 3;

using GradeHistogram = std::array<std::size_t, max_grade + 1>;

struct JudgmentRecord {
    std::string assessor;
    int topic_id = 0;
    std::string docno;
    int grade = 0;
    int round = 1;
    std::string timestamp;

    friend bool operator==(const JudgmentRecord&, const JudgmentRecord&) = default;
};

/// Two grades offered when first-round votes do not produce a majority, higher first
/// when their frequencies are equal.
using TieOptions = std::array<int, 2>;

struct FirstRoundResult {
    GradeHistogram histogram{};
    /// Set when one grade holds more than half of the votes.
    std::optional<int> majority;
    /// The two most frequent grades (frequency descending, then higher grade first);
    /// meaningful only without a majority.
    TieOptions options{};
};

/// Throws ValidationError for an empty vote list or a grade outside 0..3.
FirstRoundResult first_round(std::span<const int> votes);

enum class AggregateStatus { majority, second_round, tie_broken };

std::string_view to_string(AggregateStatus s) noexcept;

struct SecondRoundResult {
    int grade = 0;
    AggregateStatus status = AggregateStatus::second_round;
    GradeHistogram combined{};
};

/// Mode of the first-round and second-round votes together; a remaining tie goes to
/// the higher grade. Throws ValidationError when a second-round vote is not one of
/// the options.
SecondRoundResult second_round(std::span<const int> round1, TieOptions options, std::span<const int> round2);

struct AggregatedQrel {
    int topic_id = 0;
    std::string docno;
    int grade = 0;
    AggregateStatus status = AggregateStatus::majority;
    GradeHistogram histogram{};  ///< first-round votes

    friend bool operator==(const AggregatedQrel&, const AggregatedQrel&) = default;
};

struct TiedPair {
    int topic_id = 0;
    std::string docno;
    TieOptions options{};
    GradeHistogram histogram{};
    std::vector<int> round2;  ///< second-round votes so far

    friend bool operator==(const TiedPair&, const TiedPair&) = default;
};

struct Aggregation {
    std::vector<AggregatedQrel> resolved;  ///< ascending (topic, docno)
    std::vector<TiedPair> ties;            ///< still waiting for second-round votes
    /// Pairs whose first-round vote count differs from the expected count.
    std::vector<std::pair<int, std::string>> incomplete;

    friend bool operator==(const Aggregation&, const Aggregation&) = default;
};

/// Groups records by (topic, docno). Pairs with exactly `votes_per_pair` first-round
/// votes are aggregated; a tie is resolved once it has three second-round votes.
Aggregation aggregate(std::span<const JudgmentRecord> records, std::size_t votes_per_pair = default_votes_per_pair);

/// (p_o - p_e) / (1 - p_e) over grades 0..3; 1 when p_e is 1. Throws ValidationError
/// for lists of different length, empty lists, or grades out of range.
double cohen_kappa(std::span<const int> a, std::span<const int> b);

struct KappaPair {
    std::string a;
    std::string b;
    double kappa = 0.0;
    std::size_t shared = 0;  ///< pairs both assessors judged
};

struct AgreementReport {
    std::vector<std::string> assessors;
    std::vector<KappaPair> pairs;  ///< a < b; assessor pairs without shared judgments are left out
    std::optional<double> average;
};

/// Pairwise kappa over first-round judgments.
AgreementReport agreement(std::span<const JudgmentRecord> records);

struct ExportRule {
    std::size_t min_relevant = 10;   ///< topics with fewer relevant documents are dropped
    std::size_t max_relevant = 100;  ///< topics with this many or more are dropped
};

struct ExcludedTopic {
    int topic_id = 0;
    std::size_t relevant = 0;

    friend bool operator==(const ExcludedTopic&, const ExcludedTopic&) = default;
};

struct QrelsExport {
    std::vector<Qrel> qrels;
    std::vector<int> kept;
    std::vector<ExcludedTopic> excluded;
    /// Topics left out because some pair is tied or incomplete (only with allow_pending).
    std::vector<int> pending;
    GradeHistogram histogram{};  ///< over exported qrels

    [[nodiscard]] std::string report() const;
};

/// Throws ConflictError when a tie or incomplete pair remains, unless allow_pending is
/// set, in which case such topics are skipped and listed.
QrelsExport export_qrels(const Aggregation& agg, ExportRule rule = {}, bool allow_pending = false);

}  // namespace tetun
