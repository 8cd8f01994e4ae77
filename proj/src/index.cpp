#include "tetun/index.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tetun/error.hpp"
#include "tetun/parallel.hpp"

namespace tetun {

namespace {

constexpr int manifest_schema = 1;
constexpr std::size_t batch_size = 512;

std::uint32_t crc(std::uint32_t seed, std::string_view bytes)
{
    // crc32 takes a uInt length; feed large inputs in pieces.
    while (!bytes.empty()) {
        const auto n = std::min<std::size_t>(bytes.size(), 1u << 30);
        seed = static_cast<std::uint32_t>(
            ::crc32(seed, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(n)));
        bytes.remove_prefix(n);
    }
    return seed;
}

std::uint32_t chain_doc(std::uint32_t seed, std::string_view docno, std::string_view text)
{
    seed = crc(seed, docno);
    seed = crc(seed, std::string_view("\0", 1));
    seed = crc(seed, text);
    return crc(seed, std::string_view("\0", 1));
}

std::string hex32(std::uint32_t v)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(8, '0');
    for (int i = 7; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    return s;
}

void put_varint(std::string& out, std::uint64_t v)
{
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7F) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

class Reader {
  public:
    Reader(std::string_view data, std::string name) : m_data(data), m_name(std::move(name)) {}

    std::uint64_t varint()
    {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            if (m_pos >= m_data.size()) fail();
            const auto byte = static_cast<unsigned char>(m_data[m_pos++]);
            v |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
            if ((byte & 0x80) == 0) return v;
        }
        fail();
    }

    std::uint32_t u32()
    {
        const auto v = varint();
        if (v > UINT32_MAX) fail();
        return static_cast<std::uint32_t>(v);
    }

    std::string_view bytes(std::uint64_t n)
    {
        if (n > m_data.size() - m_pos) fail();
        const auto s = m_data.substr(m_pos, n);
        m_pos += n;
        return s;
    }

    [[nodiscard]] bool done() const noexcept { return m_pos == m_data.size(); }

    [[noreturn]] void fail() const { throw Error("index file " + m_name + " is corrupt at byte " + std::to_string(m_pos)); }

  private:
    std::string_view m_data;
    std::string m_name;
    std::size_t m_pos = 0;
};

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + p.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::filesystem::path& p, std::string_view data)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw Error("cannot write " + p.string());
    }
}

std::string_view field_text(const Document& d, Field f)
{
    return f == Field::title ? std::string_view(d.title) : std::string_view(d.content);
}

using TermCounts = std::vector<std::pair<std::string, std::uint32_t>>;

TermCounts count_terms(const Normalizer& norm, std::string_view text)
{
    std::map<std::string, std::uint32_t> counts;
    for (auto& t : norm(text)) ++counts[std::move(t)];
    return {std::make_move_iterator(counts.begin()), std::make_move_iterator(counts.end())};
}

nlohmann::json config_json(const NormConfig& c)
{
    auto j = nlohmann::json::object();
    std::istringstream lines(c.serialize());
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j;
}

NormConfig config_from_json(const nlohmann::json& j)
{
    std::string text;
    for (const auto& [k, v] : j.items()) text += k + "=" + v.get<std::string>() + "\n";
    return NormConfig::parse(text);
}

}  // namespace

std::string_view to_string(Field f) noexcept
{
    return f == Field::title ? "title" : "content";
}

Field parse_field(std::string_view name)
{
    if (name == "title") return Field::title;
    if (name == "content") return Field::content;
    throw ValidationError("unknown field '" + std::string(name) + "' (expected title or content)");
}

std::optional<std::uint32_t> InvertedIndex::find_document(std::string_view docno) const
{
    const auto it = m_doc_ids.find(std::string(docno));
    if (it == m_doc_ids.end()) return std::nullopt;
    return it->second;
}

const TermInfo* InvertedIndex::term(std::string_view t) const
{
    const auto it = m_terms.find(std::string(t));
    return it == m_terms.end() ? nullptr : &it->second;
}

std::uint64_t InvertedIndex::df(std::string_view t) const
{
    const auto* info = term(t);
    return info ? info->df() : 0;
}

std::uint64_t InvertedIndex::cf(std::string_view t) const
{
    const auto* info = term(t);
    return info ? info->cf : 0;
}

std::vector<std::string> InvertedIndex::vocabulary() const
{
    std::vector<std::string> out;
    out.reserve(m_terms.size());
    for (const auto& [t, info] : m_terms) out.push_back(t);
    std::sort(out.begin(), out.end());
    return out;
}

void InvertedIndex::finish()
{
    m_stats = {};
    m_stats.documents = m_docnos.size();
    for (auto len : m_lengths) m_stats.total_tokens += len;
    m_stats.vocabulary = m_terms.size();
    m_stats.avdl = m_stats.documents == 0
                       ? 0.0
                       : static_cast<double>(m_stats.total_tokens) / static_cast<double>(m_stats.documents);
    std::string key = std::string(to_string(m_field)) + "\n" + m_config.serialize() + hex32(m_corpus_hash) + "\n" +
                      std::to_string(m_stats.documents) + " " + std::to_string(m_stats.total_tokens) + " " +
                      std::to_string(m_stats.vocabulary);
    m_stats.fingerprint = crc(0, key);
}

bool operator==(const InvertedIndex& a, const InvertedIndex& b)
{
    return a.m_field == b.m_field && a.m_config == b.m_config && a.m_corpus_hash == b.m_corpus_hash &&
           a.m_docnos == b.m_docnos && a.m_lengths == b.m_lengths && a.m_terms == b.m_terms && a.m_stats == b.m_stats;
}

void InvertedIndex::save(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);

    std::string docs;
    put_varint(docs, m_docnos.size());
    for (std::size_t i = 0; i < m_docnos.size(); ++i) {
        put_varint(docs, m_docnos[i].size());
        docs += m_docnos[i];
        put_varint(docs, m_lengths[i]);
    }

    // Dictionary: sorted terms, front-coded against the previous term.
    std::string dict;
    std::string postings;
    const auto terms = vocabulary();
    put_varint(dict, terms.size());
    std::string_view prev;
    for (const auto& t : terms) {
        const auto& info = m_terms.at(t);
        std::size_t shared = 0;
        while (shared < prev.size() && shared < t.size() && prev[shared] == t[shared]) ++shared;
        put_varint(dict, shared);
        put_varint(dict, t.size() - shared);
        dict.append(t, shared);
        put_varint(dict, info.df());
        put_varint(dict, info.cf);
        const auto start = postings.size();
        std::uint32_t last = 0;
        for (const auto& p : info.postings) {
            put_varint(postings, p.doc - last);
            put_varint(postings, p.tf);
            last = p.doc;
        }
        put_varint(dict, postings.size() - start);
        prev = t;
    }

    nlohmann::json m;
    m["schema_version"] = manifest_schema;
    m["field"] = std::string(to_string(m_field));
    m["config"] = config_json(m_config);
    m["corpus_crc32"] = hex32(m_corpus_hash);
    m["stats"] = {{"documents", m_stats.documents},
                  {"total_tokens", m_stats.total_tokens},
                  {"vocabulary", m_stats.vocabulary},
                  {"fingerprint", hex32(m_stats.fingerprint)}};
    const std::pair<const char*, const std::string*> files[] = {
        {"docs.bin", &docs}, {"dictionary.bin", &dict}, {"postings.bin", &postings}};
    for (const auto& [name, data] : files) {
        m["files"][name] = {{"bytes", data->size()}, {"crc32", hex32(crc(0, *data))}};
        spit(dir / name, *data);
    }
    spit(dir / "manifest.json", m.dump(2) + "\n");
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& dir)
{
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
        throw Error("index manifest " + (dir / "manifest.json").string() + ": " + e.what());
    }
    try {
        if (m.at("schema_version").get<int>() != manifest_schema) {
            throw Error("index manifest schema_version " + m.at("schema_version").dump() + " is not supported");
        }
        InvertedIndex idx;
        idx.m_field = parse_field(m.at("field").get<std::string>());
        idx.m_config = config_from_json(m.at("config"));
        idx.m_corpus_hash = static_cast<std::uint32_t>(std::stoul(m.at("corpus_crc32").get<std::string>(), nullptr, 16));

        std::map<std::string, std::string> data;
        for (const char* name : {"docs.bin", "dictionary.bin", "postings.bin"}) {
            auto bytes = slurp(dir / name);
            const auto& entry = m.at("files").at(name);
            if (bytes.size() != entry.at("bytes").get<std::size_t>() ||
                hex32(crc(0, bytes)) != entry.at("crc32").get<std::string>()) {
                throw Error("index file " + (dir / name).string() + " does not match its manifest entry");
            }
            data[name] = std::move(bytes);
        }

        Reader docs(data["docs.bin"], "docs.bin");
        const auto n = docs.varint();
        for (std::uint64_t i = 0; i < n; ++i) {
            std::string docno(docs.bytes(docs.varint()));
            idx.m_lengths.push_back(docs.u32());
            idx.m_doc_ids.emplace(docno, static_cast<std::uint32_t>(i));
            idx.m_docnos.push_back(std::move(docno));
        }
        if (!docs.done()) docs.fail();

        Reader dict(data["dictionary.bin"], "dictionary.bin");
        Reader post(data["postings.bin"], "postings.bin");
        const auto terms = dict.varint();
        std::string prev;
        for (std::uint64_t i = 0; i < terms; ++i) {
            const auto shared = dict.varint();
            if (shared > prev.size()) dict.fail();
            std::string t = prev.substr(0, shared);
            t += dict.bytes(dict.varint());
            TermInfo info;
            const auto df = dict.varint();
            info.cf = dict.varint();
            dict.varint();  // postings byte length, only needed for skipping
            std::uint32_t doc = 0;
            for (std::uint64_t k = 0; k < df; ++k) {
                doc += post.u32();
                if (doc >= idx.m_docnos.size()) post.fail();
                info.postings.push_back({doc, post.u32()});
            }
            prev = t;
            idx.m_terms.emplace(std::move(t), std::move(info));
        }
        if (!dict.done()) dict.fail();
        if (!post.done()) post.fail();

        idx.finish();
        const auto& s = m.at("stats");
        if (s.at("documents").get<std::uint64_t>() != idx.m_stats.documents ||
            s.at("total_tokens").get<std::uint64_t>() != idx.m_stats.total_tokens ||
            s.at("vocabulary").get<std::uint64_t>() != idx.m_stats.vocabulary ||
            s.at("fingerprint").get<std::string>() != hex32(idx.m_stats.fingerprint)) {
            throw Error("index in " + dir.string() + " disagrees with the statistics in its manifest");
        }
        return idx;
    } catch (const nlohmann::json::exception& e) {
        throw Error("index manifest " + (dir / "manifest.json").string() + ": " + e.what());
    }
}

IndexBuilder::IndexBuilder(Field field, NormConfig config, unsigned threads)
    : m_norm(config), m_threads(std::max(1u, threads))
{
    m_index.m_field = field;
    m_index.m_config = config;
}

void IndexBuilder::add(const Document& doc)
{
    const auto id = static_cast<std::uint32_t>(m_index.m_docnos.size() + m_pending.size());
    if (!m_index.m_doc_ids.emplace(doc.docno, id).second) {
        throw ValidationError("duplicate docno " + doc.docno);
    }
    const auto text = field_text(doc, m_index.m_field);
    m_index.m_corpus_hash = chain_doc(m_index.m_corpus_hash, doc.docno, text);
    m_pending.emplace_back(doc.docno, std::string(text));
    if (m_pending.size() >= batch_size) flush();
}

void IndexBuilder::add(std::span<const Document> docs)
{
    for (const auto& d : docs) add(d);
}

void IndexBuilder::flush()
{
    std::vector<TermCounts> counted(m_pending.size());
    parallel_for(m_pending.size(), m_threads, [&](std::size_t i) { counted[i] = count_terms(m_norm, m_pending[i].second); });
    // Single writer, input order: postings stay sorted by doc id.
    for (std::size_t i = 0; i < m_pending.size(); ++i) {
        const auto id = static_cast<std::uint32_t>(m_index.m_docnos.size());
        std::uint64_t length = 0;
        for (auto& [t, tf] : counted[i]) {
            auto& info = m_index.m_terms[std::move(t)];
            info.postings.push_back({id, tf});
            info.cf += tf;
            length += tf;
        }
        if (length > UINT32_MAX) {
            throw ValidationError("document " + m_pending[i].first + " has more than 2^32 tokens");
        }
        m_index.m_docnos.push_back(std::move(m_pending[i].first));
        m_index.m_lengths.push_back(static_cast<std::uint32_t>(length));
    }
    m_pending.clear();
}

InvertedIndex IndexBuilder::finish()
{
    flush();
    m_index.finish();
    auto out = std::move(m_index);
    m_index = InvertedIndex{};
    m_index.m_field = out.m_field;
    m_index.m_config = out.m_config;
    return out;
}

std::uint32_t corpus_hash(std::span<const Document> docs, Field field)
{
    std::uint32_t h = 0;
    for (const auto& d : docs) h = chain_doc(h, d.docno, field_text(d, field));
    return h;
}

InvertedIndex build_index(std::span<const Document> docs, Field field, const NormConfig& config, unsigned threads)
{
    IndexBuilder b(field, config, threads);
    b.add(docs);
    return b.finish();
}

double icf(std::uint64_t baseline_terms, std::uint64_t variant_terms)
{
    if (baseline_terms == 0) {
        throw ValidationError("ICF needs a non-empty baseline vocabulary");
    }
    const double pct = 100.0 * (static_cast<double>(baseline_terms) - static_cast<double>(variant_terms)) /
                       static_cast<double>(baseline_terms);
    return std::round(pct * 100.0) / 100.0;
}

}  // namespace tetun
