#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "tetun/error.hpp"
#include "tetun/judge.hpp"
#include "tetun/pool.hpp"

namespace tetun {

struct AssessorConfig {
    std::string id;
    std::string token;
    /// May cast second-round votes.
    bool second_round = true;
};

struct JudgeConfig {
    std::vector<AssessorConfig> assessors;
    std::size_t votes_per_pair = default_votes_per_pair;
    /// Write a snapshot after this many journal entries; 0 disables snapshots.
    std::size_t snapshot_every = 50;

    /// `{"votes_per_pair": 5, "snapshot_every": 50, "assessors": [{"id": ..., "token": ..., "second_round": true}]}`.
    /// Throws ValidationError on repeated ids or tokens, or empty ones.
    static JudgeConfig parse(std::string_view json_text);
    static JudgeConfig load(const std::filesystem::path& path);
};

/// A submission that leaves pooled documents without a grade.
class MissingGradesError : public ValidationError {
  public:
    MissingGradesError(int topic, std::vector<std::string> missing);
    [[nodiscard]] const std::vector<std::string>& missing() const noexcept { return m_missing; }

  private:
    std::vector<std::string> m_missing;
};

/// Looked up something that does not exist (topic, pair).
class NotFoundError : public Error {
  public:
    using Error::Error;
};

/// The assessor may not perform this action.
class ForbiddenError : public Error {
  public:
    using Error::Error;
};

struct SubmitResult {
    std::size_t accepted = 0;
    /// True when the idempotency key matched an earlier identical request.
    bool duplicate = false;
    std::uint64_t seq = 0;
};

using Clock = std::function<std::string()>;

/// ISO 8601 UTC, seconds precision.
std::string utc_now();

/// Judgments persisted as an append-only journal (journal.jsonl, one JSON object per
/// accepted request) plus an occasional snapshot (snapshot.json). Opening a directory
/// replays both. Reads may run concurrently; writes are serialized.
class JudgeStore {
  public:
    JudgeStore(std::filesystem::path dir, PoolSet pools, JudgeConfig config, Clock clock = utc_now);

    /// Assessor id for a bearer token.
    [[nodiscard]] std::optional<std::string> authenticate(std::string_view token) const;
    [[nodiscard]] const JudgeConfig& config() const noexcept { return m_config; }
    [[nodiscard]] const PoolSet& pools() const noexcept { return m_pools; }
    [[nodiscard]] const Pool* pool(int topic) const;

    [[nodiscard]] bool locked(const std::string& assessor, int topic) const;
    /// The assessor's first-round grades for a topic; empty when not submitted.
    [[nodiscard]] std::map<std::string, int> submitted(const std::string& assessor, int topic) const;

    /// First-round grades for every pooled document of a topic. Locks the topic for the
    /// assessor. Throws NotFoundError, MissingGradesError, ValidationError (unknown docno,
    /// bad grade) or ConflictError (already locked, topic fully assessed, key reused with
    /// a different payload).
    SubmitResult submit(const std::string& assessor, int topic, const std::map<std::string, int>& grades,
                        const std::string& idempotency_key = {});

    /// One second-round vote for a tied pair.
    SubmitResult resolve_tie(const std::string& assessor, int topic, const std::string& docno, int grade,
                             const std::string& idempotency_key = {});

    [[nodiscard]] std::vector<JudgmentRecord> records() const;
    [[nodiscard]] Aggregation aggregation() const;
    [[nodiscard]] std::uint64_t last_seq() const;

    /// Writes snapshot.json through a temporary file and rename.
    void snapshot();

  private:
    struct Entry {
        std::uint64_t seq = 0;
        std::string assessor;
        int topic = 0;
        int round = 1;
        std::string timestamp;
        std::string key;
        std::map<std::string, int> grades;
    };

    void apply(const Entry& e);
    void append(const Entry& e);
    void write_snapshot();
    void replay();
    [[nodiscard]] std::string payload(const Entry& e) const;
    std::optional<SubmitResult> check_key(const Entry& e) const;

    std::filesystem::path m_dir;
    PoolSet m_pools;
    JudgeConfig m_config;
    Clock m_clock;
    std::map<int, std::size_t> m_pool_index;

    mutable std::shared_mutex m_mutex;
    std::vector<Entry> m_entries;
    std::vector<JudgmentRecord> m_records;
    std::map<std::pair<int, std::string>, std::vector<std::size_t>> m_pair_records;
    std::uint64_t m_seq = 0;
    std::uint64_t m_snapshot_seq = 0;
    std::set<std::pair<std::string, int>> m_locked;
    std::map<int, std::size_t> m_submissions;
    std::map<std::pair<std::string, std::string>, std::pair<std::string, SubmitResult>> m_keys;
};

}  // namespace tetun
