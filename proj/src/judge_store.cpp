#include "tetun/judge_store.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"

namespace tetun {

namespace {

using nlohmann::json;

constexpr int journal_schema = 1;

std::string join(const std::vector<std::string>& v, std::size_t limit)
{
    std::string s;
    for (std::size_t i = 0; i < v.size() && i < limit; ++i) s += (i ? ", " : "") + v[i];
    if (v.size() > limit) s += ", ...";
    return s;
}

// Writes `data` to `path` and flushes it to disk before returning.
void write_durable(const std::filesystem::path& path, std::string_view data, const char* mode)
{
    std::FILE* f = std::fopen(path.c_str(), mode);
    if (!f) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    const bool ok = std::fwrite(data.data(), 1, data.size(), f) == data.size() && std::fflush(f) == 0 &&
                    ::fsync(::fileno(f)) == 0;
    std::fclose(f);
    if (!ok) {
        throw Error("cannot write " + path.string());
    }
}

}  // namespace

JudgeConfig JudgeConfig::parse(std::string_view json_text)
{
    JudgeConfig c;
    try {
        const auto j = json::parse(json_text);
        c.votes_per_pair = j.value("votes_per_pair", default_votes_per_pair);
        c.snapshot_every = j.value("snapshot_every", std::size_t{50});
        for (const auto& a : j.at("assessors")) {
            c.assessors.push_back({a.at("id").get<std::string>(), a.at("token").get<std::string>(),
                                   a.value("second_round", true)});
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("judge config: ") + e.what());
    }
    if (c.votes_per_pair == 0) {
        throw ValidationError("judge config: votes_per_pair must be at least 1");
    }
    std::set<std::string> ids, tokens;
    for (const auto& a : c.assessors) {
        if (a.id.empty() || a.token.empty()) {
            throw ValidationError("judge config: assessor id and token must be non-empty");
        }
        if (!ids.insert(a.id).second) throw ValidationError("judge config: assessor " + a.id + " listed twice");
        if (!tokens.insert(a.token).second) throw ValidationError("judge config: token shared by two assessors");
    }
    return c;
}

JudgeConfig JudgeConfig::load(const std::filesystem::path& path)
{
    return parse(read_text(path));
}

MissingGradesError::MissingGradesError(int topic, std::vector<std::string> missing)
    : ValidationError("topic " + std::to_string(topic) + ": " + std::to_string(missing.size()) +
                      " pooled document(s) without a grade: " + join(missing, 10)),
      m_missing(std::move(missing))
{}

std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    ::gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

JudgeStore::JudgeStore(std::filesystem::path dir, PoolSet pools, JudgeConfig config, Clock clock)
    : m_dir(std::move(dir)), m_pools(std::move(pools)), m_config(std::move(config)), m_clock(std::move(clock))
{
    for (std::size_t i = 0; i < m_pools.pools.size(); ++i) m_pool_index[m_pools.pools[i].topic_id] = i;
    std::filesystem::create_directories(m_dir);
    replay();
}

std::optional<std::string> JudgeStore::authenticate(std::string_view token) const
{
    for (const auto& a : m_config.assessors) {
        if (!token.empty() && a.token == token) return a.id;
    }
    return std::nullopt;
}

const Pool* JudgeStore::pool(int topic) const
{
    const auto it = m_pool_index.find(topic);
    return it == m_pool_index.end() ? nullptr : &m_pools.pools[it->second];
}

bool JudgeStore::locked(const std::string& assessor, int topic) const
{
    std::shared_lock lock(m_mutex);
    return m_locked.contains({assessor, topic});
}

std::map<std::string, int> JudgeStore::submitted(const std::string& assessor, int topic) const
{
    std::shared_lock lock(m_mutex);
    for (const auto& e : m_entries) {
        if (e.round == 1 && e.assessor == assessor && e.topic == topic) return e.grades;
    }
    return {};
}

std::string JudgeStore::payload(const Entry& e) const
{
    std::string s = std::to_string(e.topic) + "|" + std::to_string(e.round);
    for (const auto& [d, g] : e.grades) s += "|" + d + "=" + std::to_string(g);
    return s;
}

std::optional<SubmitResult> JudgeStore::check_key(const Entry& e) const
{
    if (e.key.empty()) return std::nullopt;
    const auto it = m_keys.find({e.assessor, e.key});
    if (it == m_keys.end()) return std::nullopt;
    if (it->second.first != payload(e)) {
        throw ConflictError("idempotency key " + e.key + " was already used for a different request");
    }
    auto r = it->second.second;
    r.duplicate = true;
    return r;
}

SubmitResult JudgeStore::submit(const std::string& assessor, int topic, const std::map<std::string, int>& grades,
                                const std::string& idempotency_key)
{
    const auto* p = pool(topic);
    if (!p) {
        throw NotFoundError("no pool for topic " + std::to_string(topic));
    }
    Entry e;
    e.assessor = assessor;
    e.topic = topic;
    e.round = 1;
    e.key = idempotency_key;
    e.grades = grades;

    std::unique_lock lock(m_mutex);
    if (auto dup = check_key(e)) return *dup;

    std::set<std::string_view> pooled;
    for (const auto& entry : p->entries) pooled.insert(entry.docno);
    for (const auto& [docno, g] : grades) {
        if (!pooled.contains(docno)) {
            throw ValidationError("topic " + std::to_string(topic) + ": document " + docno + " is not in the pool");
        }
        if (g < 0 || g > max_grade) {
            throw ValidationError("document " + docno + ": grade " + std::to_string(g) + " outside 0..3");
        }
    }
    std::vector<std::string> missing;
    for (const auto& entry : p->entries) {
        if (!grades.contains(entry.docno)) missing.push_back(entry.docno);
    }
    if (!missing.empty()) {
        throw MissingGradesError(topic, std::move(missing));
    }
    if (m_locked.contains({assessor, topic})) {
        throw ConflictError("topic " + std::to_string(topic) + " is already completed by " + assessor);
    }
    if (m_submissions[topic] >= m_config.votes_per_pair) {
        throw ConflictError("topic " + std::to_string(topic) + " already has " +
                            std::to_string(m_config.votes_per_pair) + " assessments");
    }
    e.seq = m_seq + 1;
    e.timestamp = m_clock();
    append(e);
    return {grades.size(), false, e.seq};
}

SubmitResult JudgeStore::resolve_tie(const std::string& assessor, int topic, const std::string& docno, int grade,
                                     const std::string& idempotency_key)
{
    const auto* p = pool(topic);
    if (!p || std::none_of(p->entries.begin(), p->entries.end(), [&](const auto& x) { return x.docno == docno; })) {
        throw NotFoundError("no pooled pair " + std::to_string(topic) + ":" + docno);
    }
    Entry e;
    e.assessor = assessor;
    e.topic = topic;
    e.round = 2;
    e.key = idempotency_key;
    e.grades = {{docno, grade}};

    std::unique_lock lock(m_mutex);
    if (auto dup = check_key(e)) return *dup;

    const auto cfg = std::find_if(m_config.assessors.begin(), m_config.assessors.end(),
                                  [&](const auto& a) { return a.id == assessor; });
    if (cfg == m_config.assessors.end() || !cfg->second_round) {
        throw ForbiddenError(assessor + " is not a second-round assessor");
    }
    std::vector<int> round1, round2;
    bool judged_first = false;
    bool judged_second = false;
    if (const auto it = m_pair_records.find({topic, docno}); it != m_pair_records.end()) {
        for (auto i : it->second) {
            const auto& r = m_records[i];
            (r.round == 1 ? round1 : round2).push_back(r.grade);
            if (r.assessor == assessor) (r.round == 1 ? judged_first : judged_second) = true;
        }
    }
    const auto name = std::to_string(topic) + ":" + docno;
    if (round1.size() != m_config.votes_per_pair) {
        throw ConflictError(name + " does not have all first-round votes yet");
    }
    const auto first = first_round(round1);
    if (first.majority) {
        throw ConflictError(name + " is not tied");
    }
    if (round2.size() >= second_round_votes) {
        throw ConflictError(name + " already has its second-round votes");
    }
    if (!judged_first) {
        throw ForbiddenError(assessor + " did not judge " + name + " in the first round");
    }
    if (judged_second) {
        throw ConflictError(assessor + " already voted on " + name + " in the second round");
    }
    if (grade != first.options[0] && grade != first.options[1]) {
        throw ValidationError("grade " + std::to_string(grade) + " is not one of the offered options " +
                              std::to_string(first.options[0]) + " and " + std::to_string(first.options[1]));
    }
    e.seq = m_seq + 1;
    e.timestamp = m_clock();
    append(e);
    return {1, false, e.seq};
}

std::vector<JudgmentRecord> JudgeStore::records() const
{
    std::shared_lock lock(m_mutex);
    return m_records;
}

Aggregation JudgeStore::aggregation() const
{
    std::shared_lock lock(m_mutex);
    return aggregate(m_records, m_config.votes_per_pair);
}

std::uint64_t JudgeStore::last_seq() const
{
    std::shared_lock lock(m_mutex);
    return m_seq;
}

void JudgeStore::apply(const Entry& e)
{
    for (const auto& [docno, g] : e.grades) {
        m_pair_records[{e.topic, docno}].push_back(m_records.size());
        m_records.push_back({e.assessor, e.topic, docno, g, e.round, e.timestamp});
    }
    if (e.round == 1) {
        m_locked.insert({e.assessor, e.topic});
        ++m_submissions[e.topic];
    }
    if (!e.key.empty()) m_keys[{e.assessor, e.key}] = {payload(e), SubmitResult{e.grades.size(), false, e.seq}};
    m_seq = e.seq;
    m_entries.push_back(e);
}

namespace {

json entry_json(std::uint64_t seq, const std::string& assessor, int topic, int round, const std::string& timestamp,
                const std::string& key, const std::map<std::string, int>& grades)
{
    return {{"schema_version", journal_schema},
            {"seq", seq},
            {"assessor", assessor},
            {"topic_id", topic},
            {"round", round},
            {"timestamp", timestamp},
            {"idempotency_key", key},
            {"grades", grades}};
}

}  // namespace

void JudgeStore::append(const Entry& e)
{
    const auto line = entry_json(e.seq, e.assessor, e.topic, e.round, e.timestamp, e.key, e.grades).dump() + "\n";
    write_durable(m_dir / "journal.jsonl", line, "ab");
    apply(e);
    if (m_config.snapshot_every > 0 && m_seq - m_snapshot_seq >= m_config.snapshot_every) write_snapshot();
}

void JudgeStore::snapshot()
{
    std::unique_lock lock(m_mutex);
    write_snapshot();
}

void JudgeStore::write_snapshot()
{
    json entries = json::array();
    for (const auto& e : m_entries) {
        entries.push_back(entry_json(e.seq, e.assessor, e.topic, e.round, e.timestamp, e.key, e.grades));
    }
    const json snap{{"schema_version", journal_schema}, {"seq", m_seq}, {"entries", std::move(entries)}};
    const auto tmp = m_dir / "snapshot.json.tmp";
    write_durable(tmp, snap.dump() + "\n", "wb");
    std::filesystem::rename(tmp, m_dir / "snapshot.json");
    m_snapshot_seq = m_seq;
}

void JudgeStore::replay()
{
    const auto parse_entry = [](const json& j) {
        if (j.at("schema_version").get<int>() != journal_schema) {
            throw Error("journal schema_version " + j.at("schema_version").dump() + " is not supported");
        }
        Entry e;
        e.seq = j.at("seq").get<std::uint64_t>();
        e.assessor = j.at("assessor").get<std::string>();
        e.topic = j.at("topic_id").get<int>();
        e.round = j.at("round").get<int>();
        e.timestamp = j.at("timestamp").get<std::string>();
        e.key = j.at("idempotency_key").get<std::string>();
        e.grades = j.at("grades").get<std::map<std::string, int>>();
        return e;
    };

    const auto snap_path = m_dir / "snapshot.json";
    if (std::filesystem::exists(snap_path)) {
        try {
            const auto snap = json::parse(read_text(snap_path));
            for (const auto& j : snap.at("entries")) apply(parse_entry(j));
            m_snapshot_seq = snap.at("seq").get<std::uint64_t>();
            if (m_snapshot_seq != m_seq) throw Error("snapshot seq disagrees with its entries");
        } catch (const json::exception& ex) {
            throw Error("snapshot " + snap_path.string() + ": " + ex.what());
        }
    }

    const auto journal_path = m_dir / "journal.jsonl";
    if (!std::filesystem::exists(journal_path)) return;
    auto text = read_text(journal_path);
    // A write cut short leaves a final line without its newline; that request was
    // never acknowledged, so drop it.
    const auto complete = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
    if (complete != text.size()) {
        std::filesystem::resize_file(journal_path, complete);
        text.resize(complete);
    }
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) continue;
        Entry e;
        try {
            e = parse_entry(json::parse(line));
        } catch (const json::exception& ex) {
            throw ParseError(std::string("journal: ") + ex.what(), line_no);
        }
        if (e.seq <= m_seq) continue;  // already covered by the snapshot
        if (e.seq != m_seq + 1) {
            throw ParseError("journal seq " + std::to_string(e.seq) + " follows " + std::to_string(m_seq), line_no);
        }
        apply(e);
    }
}

}  // namespace tetun
