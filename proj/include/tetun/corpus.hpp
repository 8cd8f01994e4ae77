#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tetun {

struct Document {
    std::string docno;
    std::string title;
    std::string url;
    std::string source;
    std::string date;
    std::string content;
    /// Tags inside <DOC> that are not part of the fixed field set, in input order.
    /// Kept for round-tripping; nothing downstream reads them.
    std::vector<std::pair<std::string, std::string>> extra;

    friend bool operator==(const Document&, const Document&) = default;
};

struct Topic {
    int topic_id = 0;
    std::string title;
    std::string description;
    std::string narrative;

    friend bool operator==(const Topic&, const Topic&) = default;
};

struct Qrel {
    int topic_id = 0;
    std::string docno;
    int grade = 0;

    friend bool operator==(const Qrel&, const Qrel&) = default;
};

struct RunEntry {
    int topic_id = 0;
    std::string docno;
    int rank = 0;
    double score = 0.0;
    std::string run_tag;

    friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

inline constexpr std::size_t default_record_cap = std::size_t{64} << 20;

/// Pulls one <DOC> block at a time from a stream. Memory use is bounded by the
/// size of the largest record, which in turn is capped.
class DocumentReader {
  public:
    explicit DocumentReader(std::istream& in, std::size_t record_cap = default_record_cap);

    /// Next document, or nullopt at end of stream. Throws ParseError on malformed input.
    std::optional<Document> next();

  private:
    int get();

    std::istream& m_in;
    std::size_t m_cap;
    std::size_t m_line = 1;
};

std::vector<Document> parse_documents(std::istream& in, std::size_t record_cap = default_record_cap);
std::vector<Document> parse_documents(std::string_view text, std::size_t record_cap = default_record_cap);
/// Throws ValidationError if a field contains its own closing tag.
void write_documents(std::ostream& out, std::span<const Document> docs);

/// Accepts closed or unclosed <num>/<title>/<desc>/<narr> fields and strips the
/// conventional "Number:", "Description:" and "Narrative:" labels.
std::vector<Topic> parse_topics(std::istream& in);
std::vector<Topic> parse_topics(std::string_view text);
/// Closed-tag form, ordered by topic id.
void write_topics(std::ostream& out, std::span<const Topic> topics);

/// `topic_id iteration docno grade` per line.
std::vector<Qrel> parse_qrels(std::istream& in);
std::vector<Qrel> parse_qrels(std::string_view text);
/// Ordered by topic id, then docno; iteration column written as 0.
void write_qrels(std::ostream& out, std::span<const Qrel> qrels);

/// `topic_id Q0 docno rank score tag` per line. Within a topic the ranks must be
/// 1..n without gaps and scores must not increase with rank.
std::vector<RunEntry> parse_run(std::istream& in);
std::vector<RunEntry> parse_run(std::string_view text);
/// Ordered by topic id, then rank. Scores use the shortest round-trip representation.
void write_run(std::ostream& out, std::span<const RunEntry> run);
/// Shortest decimal form that parses back to the same double.
std::string format_score(double v);

/// Opens a file for reading, decompressing transparently when the name ends in ".gz".
std::unique_ptr<std::istream> open_input(const std::filesystem::path& path);
/// Whole file contents, gzip-aware.
std::string read_text(const std::filesystem::path& path);

std::vector<Document> read_documents(const std::filesystem::path& path);
std::vector<Topic> read_topics(const std::filesystem::path& path);
std::vector<Qrel> read_qrels(const std::filesystem::path& path);
std::vector<RunEntry> read_run(const std::filesystem::path& path);

}  // namespace tetun
