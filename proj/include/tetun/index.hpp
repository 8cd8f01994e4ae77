#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tetun/corpus.hpp"
#include "tetun/textnorm.hpp"

namespace tetun {

enum class Field { title, content };

std::string_view to_string(Field f) noexcept;
Field parse_field(std::string_view name);

struct CollectionStats {
    std::uint64_t documents = 0;
    std::uint64_t total_tokens = 0;
    std::uint64_t vocabulary = 0;
    /// total_tokens / documents, or 0 for an empty collection.
    double avdl = 0.0;
    /// Identifies the index these numbers came from.
    std::uint32_t fingerprint = 0;

    friend bool operator==(const CollectionStats&, const CollectionStats&) = default;
};

struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct TermInfo {
    std::vector<Posting> postings;  ///< ascending doc id
    std::uint64_t cf = 0;

    [[nodiscard]] std::uint64_t df() const noexcept { return postings.size(); }
    friend bool operator==(const TermInfo&, const TermInfo&) = default;
};

/// Immutable after construction; safe to share between reader threads.
class InvertedIndex {
  public:
    InvertedIndex() = default;

    [[nodiscard]] Field field() const noexcept { return m_field; }
    [[nodiscard]] const NormConfig& config() const noexcept { return m_config; }
    /// crc32 over every indexed (docno, field text) pair in input order.
    [[nodiscard]] std::uint32_t corpus_hash() const noexcept { return m_corpus_hash; }

    [[nodiscard]] std::size_t document_count() const noexcept { return m_docnos.size(); }
    [[nodiscard]] const std::string& docno(std::uint32_t doc) const { return m_docnos.at(doc); }
    [[nodiscard]] std::uint32_t doc_length(std::uint32_t doc) const { return m_lengths.at(doc); }
    [[nodiscard]] std::optional<std::uint32_t> find_document(std::string_view docno) const;

    /// nullptr for a term that never occurs.
    [[nodiscard]] const TermInfo* term(std::string_view t) const;
    [[nodiscard]] std::uint64_t df(std::string_view t) const;
    [[nodiscard]] std::uint64_t cf(std::string_view t) const;
    /// Every indexed term, sorted.
    [[nodiscard]] std::vector<std::string> vocabulary() const;

    [[nodiscard]] const CollectionStats& stats() const noexcept { return m_stats; }

    /// Writes manifest.json, docs.bin, dictionary.bin and postings.bin into `dir`,
    /// creating it if needed. Identical indexes give identical bytes.
    void save(const std::filesystem::path& dir) const;
    /// Throws Error when a file is missing, truncated, or disagrees with the manifest.
    static InvertedIndex load(const std::filesystem::path& dir);

    friend bool operator==(const InvertedIndex& a, const InvertedIndex& b);

  private:
    friend class IndexBuilder;

    void finish();

    Field m_field = Field::content;
    NormConfig m_config;
    std::uint32_t m_corpus_hash = 0;
    std::vector<std::string> m_docnos;
    std::vector<std::uint32_t> m_lengths;
    std::unordered_map<std::string, std::uint32_t> m_doc_ids;
    std::unordered_map<std::string, TermInfo> m_terms;
    CollectionStats m_stats;
};

/// Tokenizes documents in parallel batches and merges them in input order, so the
/// result does not depend on the thread count.
class IndexBuilder {
  public:
    IndexBuilder(Field field, NormConfig config, unsigned threads = 1);

    /// Throws ValidationError on a docno already added.
    void add(const Document& doc);
    void add(std::span<const Document> docs);
    InvertedIndex finish();

  private:
    void flush();

    Normalizer m_norm;
    unsigned m_threads;
    InvertedIndex m_index;
    std::vector<std::pair<std::string, std::string>> m_pending;
};

/// The value InvertedIndex::corpus_hash() would hold after indexing `docs`.
std::uint32_t corpus_hash(std::span<const Document> docs, Field field);

InvertedIndex build_index(std::span<const Document> docs, Field field, const NormConfig& config,
                          unsigned threads = 1);

/// 100 * (baseline - variant) / baseline, rounded to two decimals.
/// Throws ValidationError when baseline_terms is 0.
double icf(std::uint64_t baseline_terms, std::uint64_t variant_terms);

}  // namespace tetun
