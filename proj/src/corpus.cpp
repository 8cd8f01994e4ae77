#include "tetun/corpus.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "tetun/error.hpp"
#include "tetun/utf8.hpp"

namespace tetun {

namespace {

constexpr std::size_t max_tag_length = 64;

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s)
{
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && is_ws(s[a])) ++a;
    while (b > a && is_ws(s[b - 1])) --b;
    return s.substr(a, b - a);
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string ascii_upper(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    return out;
}

struct Tag {
    std::string name;  // lowercased
    bool closing = false;
    std::size_t end = 0;  // one past '>'
};

// A tag is '<', optional whitespace, optional '/', a name of [A-Za-z0-9_-], optional
// whitespace and '>'. Anything else starting with '<' is ordinary text.
std::optional<Tag> scan_tag(std::string_view s, std::size_t lt)
{
    if (lt >= s.size() || s[lt] != '<') {
        return std::nullopt;
    }
    const std::size_t limit = std::min(s.size(), lt + max_tag_length);
    std::size_t i = lt + 1;
    while (i < limit && is_ws(s[i])) ++i;
    Tag t;
    if (i < limit && s[i] == '/') {
        t.closing = true;
        ++i;
        while (i < limit && is_ws(s[i])) ++i;
    }
    while (i < limit) {
        const char c = s[i];
        const bool name_char = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!name_char) break;
        t.name.push_back(ascii_lower(c));
        ++i;
    }
    if (t.name.empty()) {
        return std::nullopt;
    }
    while (i < limit && is_ws(s[i])) ++i;
    if (i >= limit || s[i] != '>') {
        return std::nullopt;
    }
    t.end = i + 1;
    return t;
}

// Position of the next tag at or after `from` satisfying `pred`, with the tag itself.
template <typename Pred>
std::optional<std::pair<std::size_t, Tag>> find_tag(std::string_view s, std::size_t from, Pred pred)
{
    for (auto lt = s.find('<', from); lt != std::string_view::npos; lt = s.find('<', lt + 1)) {
        if (auto t = scan_tag(s, lt); t && pred(*t)) {
            return std::make_pair(lt, std::move(*t));
        }
    }
    return std::nullopt;
}

std::size_t line_at(std::string_view s, std::size_t pos, std::size_t base)
{
    return base + static_cast<std::size_t>(std::count(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

std::string excerpt(std::string_view s)
{
    auto t = trim(s);
    std::string out(t.substr(0, 40));
    std::replace(out.begin(), out.end(), '\n', ' ');
    return out;
}

void check_utf8(std::string_view s, std::size_t base_line, const std::string& context)
{
    if (auto bad = utf8::find_invalid(s)) {
        throw ParseError("invalid UTF-8 byte sequence", line_at(s, *bad, base_line), context);
    }
}

std::string docno_hint(std::string_view body)
{
    auto open = find_tag(body, 0, [](const Tag& t) { return !t.closing && t.name == "docno"; });
    if (!open) return {};
    auto close = find_tag(body, open->second.end, [](const Tag& t) { return t.closing && t.name == "docno"; });
    if (!close) return {};
    return "docno " + std::string(trim(body.substr(open->second.end, close->first - open->second.end)));
}

Document parse_record(std::string_view body, std::size_t base_line)
{
    const std::string hint = docno_hint(body);
    check_utf8(body, base_line, hint);
    Document doc;
    std::set<std::string> seen;
    bool has_docno = false;
    std::size_t pos = 0;
    while (true) {
        while (pos < body.size() && is_ws(body[pos])) ++pos;
        if (pos >= body.size()) break;
        const auto open = scan_tag(body, pos);
        if (!open) {
            throw ParseError("text outside a field tag", line_at(body, pos, base_line),
                             hint.empty() ? excerpt(body.substr(pos)) : hint);
        }
        if (open->closing) {
            throw ParseError("unexpected </" + ascii_upper(open->name) + ">", line_at(body, pos, base_line), hint);
        }
        const auto close = find_tag(body, open->end, [&](const Tag& t) { return t.closing && t.name == open->name; });
        if (!close) {
            throw ParseError("unclosed <" + ascii_upper(open->name) + ">", line_at(body, pos, base_line), hint);
        }
        std::string value(trim(body.substr(open->end, close->first - open->end)));
        const auto& name = open->name;
        if (!seen.insert(name).second && (name == "docno" || name == "title" || name == "url" || name == "source"
                                          || name == "date" || name == "content")) {
            throw ParseError("duplicate <" + ascii_upper(name) + ">", line_at(body, pos, base_line), hint);
        }
        if (name == "docno") {
            doc.docno = std::move(value);
            has_docno = true;
        } else if (name == "title") {
            doc.title = std::move(value);
        } else if (name == "url") {
            doc.url = std::move(value);
        } else if (name == "source") {
            doc.source = std::move(value);
        } else if (name == "date") {
            doc.date = std::move(value);
        } else if (name == "content") {
            doc.content = std::move(value);
        } else {
            doc.extra.emplace_back(name, std::move(value));
        }
        pos = close->second.end;
    }
    if (!has_docno || doc.docno.empty()) {
        throw ParseError(has_docno ? "empty <DOCNO>" : "missing <DOCNO>", base_line, excerpt(body));
    }
    return doc;
}

bool contains_close_tag(std::string_view value, std::string_view name)
{
    return find_tag(value, 0, [&](const Tag& t) { return t.closing && t.name == name; }).has_value();
}

bool has_space(std::string_view s)
{
    return std::any_of(s.begin(), s.end(), is_ws);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_ws(line[i])) ++i;
        const std::size_t start = i;
        while (i < line.size() && !is_ws(line[i])) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        check_utf8(line, line_no, {});
        fn(std::string_view(line), line_no);
    }
}

std::string slurp(std::istream& in)
{
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class GzStreamBuf : public std::streambuf {
  public:
    explicit GzStreamBuf(const std::filesystem::path& path) : m_file(gzopen(path.c_str(), "rb"))
    {
        if (m_file == nullptr) {
            throw Error("cannot open " + path.string());
        }
    }
    GzStreamBuf(const GzStreamBuf&) = delete;
    GzStreamBuf& operator=(const GzStreamBuf&) = delete;
    ~GzStreamBuf() override { gzclose(m_file); }

  protected:
    int_type underflow() override
    {
        const int n = gzread(m_file, m_buf.data(), static_cast<unsigned>(m_buf.size()));
        if (n < 0) {
            int code = 0;
            throw Error(std::string("gzip read error: ") + gzerror(m_file, &code));
        }
        if (n == 0) {
            return traits_type::eof();
        }
        setg(m_buf.data(), m_buf.data(), m_buf.data() + n);
        return traits_type::to_int_type(*gptr());
    }

  private:
    gzFile m_file;
    std::array<char, 1 << 16> m_buf{};
};

class GzIStream : public std::istream {
  public:
    explicit GzIStream(const std::filesystem::path& path) : std::istream(nullptr), m_buf(path)
    {
        rdbuf(&m_buf);
        exceptions(std::ios::badbit);
    }

  private:
    GzStreamBuf m_buf;
};

}  // namespace

DocumentReader::DocumentReader(std::istream& in, std::size_t record_cap) : m_in(in), m_cap(record_cap) {}

int DocumentReader::get()
{
    const int c = m_in.get();
    if (c == '\n') ++m_line;
    return c;
}

std::optional<Document> DocumentReader::next()
{
    constexpr int eof = std::char_traits<char>::eof();
    int c = 0;
    while (true) {
        c = get();
        if (c == eof) return std::nullopt;
        if (c == '<') break;
        if (!is_ws(static_cast<char>(c))) {
            throw ParseError("text outside a <DOC> block", m_line, std::string(1, static_cast<char>(c)));
        }
    }
    const std::size_t start_line = m_line;
    std::string tag = "<";
    while (tag.size() < max_tag_length && (c = get()) != eof) {
        tag.push_back(static_cast<char>(c));
        if (c == '>') break;
    }
    const auto open = scan_tag(tag, 0);
    if (!open || open->closing || open->name != "doc" || open->end != tag.size()) {
        throw ParseError("expected <DOC>", start_line, excerpt(tag));
    }

    std::string body;
    std::size_t last_lt = std::string::npos;
    while (true) {
        c = get();
        if (c == eof) {
            throw ParseError("unclosed <DOC>", start_line, docno_hint(body));
        }
        body.push_back(static_cast<char>(c));
        if (body.size() > m_cap) {
            throw ParseError("record exceeds " + std::to_string(m_cap) + " bytes without </DOC>", start_line,
                             docno_hint(body));
        }
        if (c == '<') {
            last_lt = body.size() - 1;
        } else if (c == '>' && last_lt != std::string::npos) {
            if (auto t = scan_tag(body, last_lt); t && t->name == "doc") {
                if (!t->closing) {
                    throw ParseError("unclosed <DOC> (next <DOC> starts before </DOC>)", start_line, docno_hint(body));
                }
                body.resize(last_lt);
                break;
            }
            last_lt = std::string::npos;
        }
    }
    return parse_record(body, start_line);
}

std::vector<Document> parse_documents(std::istream& in, std::size_t record_cap)
{
    DocumentReader reader(in, record_cap);
    std::vector<Document> docs;
    std::set<std::string> seen;
    while (auto d = reader.next()) {
        if (!seen.insert(d->docno).second) {
            throw ValidationError("duplicate docno '" + d->docno + "'");
        }
        docs.push_back(std::move(*d));
    }
    return docs;
}

std::vector<Document> parse_documents(std::string_view text, std::size_t record_cap)
{
    std::istringstream in{std::string(text)};
    return parse_documents(in, record_cap);
}

void write_documents(std::ostream& out, std::span<const Document> docs)
{
    const auto field = [&out](std::string_view name, std::string_view value, bool block) {
        if (contains_close_tag(value, name)) {
            throw ValidationError("field <" + ascii_upper(name) + "> contains its own closing tag");
        }
        const auto upper = ascii_upper(name);
        out << '<' << upper << '>';
        if (block) out << '\n' << value << '\n';
        else out << value;
        out << "</" << upper << ">\n";
    };
    for (const auto& d : docs) {
        if (trim(d.docno).empty()) {
            throw ValidationError("document without docno");
        }
        out << "<DOC>\n";
        field("docno", d.docno, false);
        field("title", d.title, false);
        field("url", d.url, false);
        field("source", d.source, false);
        field("date", d.date, false);
        for (const auto& [name, value] : d.extra) {
            field(name, value, false);
        }
        field("content", d.content, true);
        out << "</DOC>\n";
    }
}

std::vector<Topic> parse_topics(std::string_view text)
{
    check_utf8(text, 1, {});
    std::vector<Topic> topics;
    std::set<int> seen;
    std::size_t pos = 0;
    while (true) {
        while (pos < text.size() && is_ws(text[pos])) ++pos;
        if (pos >= text.size()) break;
        const auto open = scan_tag(text, pos);
        if (!open || open->closing || open->name != "top") {
            throw ParseError("expected <top>", line_at(text, pos, 1), excerpt(text.substr(pos)));
        }
        const std::size_t block_line = line_at(text, pos, 1);
        const auto close = find_tag(text, open->end, [](const Tag& t) { return t.name == "top"; });
        if (!close || !close->second.closing) {
            throw ParseError("unclosed <top>", block_line);
        }
        const auto block = text.substr(open->end, close->first - open->end);

        // Every tag ends the current field, so closed and unclosed styles parse alike.
        std::map<std::string, std::string> fields;
        std::size_t p = 0;
        std::string current;
        std::size_t value_start = 0;
        const auto flush = [&](std::size_t end) {
            if (current.empty()) {
                if (!trim(block.substr(value_start, end - value_start)).empty()) {
                    throw ParseError("text outside a topic field", line_at(block, value_start, block_line),
                                     excerpt(block.substr(value_start, end - value_start)));
                }
                return;
            }
            if (fields.contains(current)) {
                throw ParseError("duplicate <" + current + ">", block_line);
            }
            fields[current] = std::string(trim(block.substr(value_start, end - value_start)));
        };
        while (true) {
            auto next = find_tag(block, p, [](const Tag&) { return true; });
            const std::size_t end = next ? next->first : block.size();
            flush(end);
            if (!next) break;
            const auto& t = next->second;
            const bool known = t.name == "num" || t.name == "title" || t.name == "desc" || t.name == "narr";
            current = (!t.closing && known) ? t.name : std::string{};
            value_start = t.end;
            p = t.end;
            if (!t.closing && !known) {
                // Unknown field: skip its content up to the next tag.
                current.clear();
                auto after = find_tag(block, p, [](const Tag&) { return true; });
                p = after ? after->first : block.size();
                value_start = p;
            }
        }

        const auto strip_label = [](std::string s, std::string_view label) {
            std::string_view v = s;
            if (v.size() >= label.size()
                && std::equal(label.begin(), label.end(), v.begin(),
                              [](char a, char b) { return ascii_lower(a) == ascii_lower(b); })) {
                return std::string(trim(v.substr(label.size())));
            }
            return s;
        };
        if (!fields.contains("num")) {
            throw ParseError("topic without <num>", block_line);
        }
        Topic t;
        const auto num = strip_label(fields["num"], "number:");
        if (!parse_number(num, t.topic_id)) {
            throw ParseError("topic number '" + num + "' is not an integer", block_line);
        }
        if (t.topic_id < 1) {
            throw ValidationError("line " + std::to_string(block_line) + ": topic id must be at least 1");
        }
        t.title = fields["title"];
        t.description = strip_label(fields["desc"], "description:");
        t.narrative = strip_label(fields["narr"], "narrative:");
        if (t.title.empty()) {
            throw ValidationError("line " + std::to_string(block_line) + ": topic " + std::to_string(t.topic_id)
                                  + " has an empty title");
        }
        if (!seen.insert(t.topic_id).second) {
            throw ValidationError("line " + std::to_string(block_line) + ": duplicate topic " + std::to_string(t.topic_id));
        }
        topics.push_back(std::move(t));
        pos = close->second.end;
    }
    return topics;
}

std::vector<Topic> parse_topics(std::istream& in) { return parse_topics(slurp(in)); }

void write_topics(std::ostream& out, std::span<const Topic> topics)
{
    std::vector<const Topic*> sorted;
    for (const auto& t : topics) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->topic_id < b->topic_id; });
    for (const auto* t : sorted) {
        for (auto [name, value] : {std::pair<std::string_view, const std::string*>{"title", &t->title},
                                   {"desc", &t->description},
                                   {"narr", &t->narrative}}) {
            if (find_tag(*value, 0, [](const Tag&) { return true; })) {
                throw ValidationError("topic " + std::to_string(t->topic_id) + ": <" + std::string(name)
                                      + "> contains markup");
            }
        }
        out << "<top>\n<num>" << t->topic_id << "</num>\n<title>" << t->title << "</title>\n<desc>" << t->description
            << "</desc>\n<narr>" << t->narrative << "</narr>\n</top>\n";
    }
}

std::vector<Qrel> parse_qrels(std::istream& in)
{
    std::vector<Qrel> out;
    std::set<std::pair<int, std::string>> seen;
    for_each_line(in, [&](std::string_view line, std::size_t n) {
        const auto f = split_fields(line);
        if (f.size() != 4) {
            throw ParseError("expected 4 fields (topic iteration docno grade), got " + std::to_string(f.size()), n,
                             excerpt(line));
        }
        Qrel q;
        if (!parse_number(f[0], q.topic_id)) {
            throw ParseError("topic id '" + std::string(f[0]) + "' is not an integer", n);
        }
        q.docno = std::string(f[2]);
        if (!parse_number(f[3], q.grade)) {
            throw ParseError("grade '" + std::string(f[3]) + "' is not an integer", n);
        }
        if (q.grade < 0 || q.grade > 3) {
            throw ValidationError("line " + std::to_string(n) + ": grade " + std::to_string(q.grade)
                                  + " outside 0..3");
        }
        if (!seen.emplace(q.topic_id, q.docno).second) {
            throw ValidationError("line " + std::to_string(n) + ": duplicate judgment for topic "
                                  + std::to_string(q.topic_id) + ", " + q.docno);
        }
        out.push_back(std::move(q));
    });
    return out;
}

std::vector<Qrel> parse_qrels(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_qrels(in);
}

void write_qrels(std::ostream& out, std::span<const Qrel> qrels)
{
    std::vector<const Qrel*> sorted;
    for (const auto& q : qrels) {
        if (q.docno.empty() || has_space(q.docno)) {
            throw ValidationError("qrel docno '" + q.docno + "' is empty or contains whitespace");
        }
        if (q.grade < 0 || q.grade > 3) {
            throw ValidationError("qrel grade " + std::to_string(q.grade) + " outside 0..3");
        }
        sorted.push_back(&q);
    }
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) {
        return std::tie(a->topic_id, a->docno) < std::tie(b->topic_id, b->docno);
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->topic_id == sorted[i - 1]->topic_id && sorted[i]->docno == sorted[i - 1]->docno) {
            throw ValidationError("duplicate judgment for topic " + std::to_string(sorted[i]->topic_id) + ", "
                                  + sorted[i]->docno);
        }
    }
    for (const auto* q : sorted) {
        out << q->topic_id << " 0 " << q->docno << ' ' << q->grade << '\n';
    }
}

namespace {

void validate_run(std::span<const RunEntry> run)
{
    std::map<int, std::vector<const RunEntry*>> by_topic;
    for (const auto& e : run) by_topic[e.topic_id].push_back(&e);
    for (auto& [topic, entries] : by_topic) {
        std::sort(entries.begin(), entries.end(), [](auto a, auto b) { return a->rank < b->rank; });
        std::set<std::string_view> docs;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto& e = *entries[i];
            if (e.rank != static_cast<int>(i + 1)) {
                throw ValidationError("topic " + std::to_string(topic) + ": ranks are not 1.." + std::to_string(entries.size())
                                      + " without gaps (found rank " + std::to_string(e.rank) + " at position "
                                      + std::to_string(i + 1) + ")");
            }
            if (i > 0 && e.score > entries[i - 1]->score) {
                throw ValidationError("topic " + std::to_string(topic) + ": score increases at rank " + std::to_string(e.rank));
            }
            if (!docs.insert(e.docno).second) {
                throw ValidationError("topic " + std::to_string(topic) + ": document " + e.docno + " ranked twice");
            }
        }
    }
}

}  // namespace

std::vector<RunEntry> parse_run(std::istream& in)
{
    std::vector<RunEntry> out;
    for_each_line(in, [&](std::string_view line, std::size_t n) {
        const auto f = split_fields(line);
        if (f.size() != 6) {
            throw ParseError("expected 6 fields (topic Q0 docno rank score tag), got " + std::to_string(f.size()), n,
                             excerpt(line));
        }
        RunEntry e;
        if (!parse_number(f[0], e.topic_id)) {
            throw ParseError("topic id '" + std::string(f[0]) + "' is not an integer", n);
        }
        e.docno = std::string(f[2]);
        if (!parse_number(f[3], e.rank) || e.rank < 1) {
            throw ParseError("rank '" + std::string(f[3]) + "' is not a positive integer", n);
        }
        if (!parse_number(f[4], e.score) || !std::isfinite(e.score)) {
            throw ParseError("score '" + std::string(f[4]) + "' is not a finite number", n);
        }
        e.run_tag = std::string(f[5]);
        out.push_back(std::move(e));
    });
    validate_run(out);
    return out;
}

std::vector<RunEntry> parse_run(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_run(in);
}

std::string format_score(double v)
{
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

void write_run(std::ostream& out, std::span<const RunEntry> run)
{
    validate_run(run);
    std::vector<const RunEntry*> sorted;
    for (const auto& e : run) {
        if (e.docno.empty() || has_space(e.docno) || e.run_tag.empty() || has_space(e.run_tag)) {
            throw ValidationError("run entry for topic " + std::to_string(e.topic_id)
                                  + " has an empty or whitespace-containing docno or tag");
        }
        if (!std::isfinite(e.score)) {
            throw ValidationError("run entry for topic " + std::to_string(e.topic_id) + " has a non-finite score");
        }
        sorted.push_back(&e);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](auto a, auto b) { return std::tie(a->topic_id, a->rank) < std::tie(b->topic_id, b->rank); });
    for (const auto* e : sorted) {
        out << e->topic_id << " Q0 " << e->docno << ' ' << e->rank << ' ' << format_score(e->score) << ' '
            << e->run_tag << '\n';
    }
}

std::unique_ptr<std::istream> open_input(const std::filesystem::path& path)
{
    if (path.extension() == ".gz") {
        return std::make_unique<GzIStream>(path);
    }
    auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*in) {
        throw Error("cannot open " + path.string());
    }
    return in;
}

std::string read_text(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return slurp(*in);
}

std::vector<Document> read_documents(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse_documents(*in);
}

std::vector<Topic> read_topics(const std::filesystem::path& path) { return parse_topics(read_text(path)); }

std::vector<Qrel> read_qrels(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse_qrels(*in);
}

std::vector<RunEntry> read_run(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse_run(*in);
}

}  // namespace tetun
