#include "tetun/judge_server.hpp"

#include <map>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace tetun {

namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, json body)
{
    body["schema_version"] = api_schema_version;
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message, json extra = json::object())
{
    extra["error"] = message;
    reply(res, status, std::move(extra));
}

json topic_json(const Topic& t)
{
    return {{"topic_id", t.topic_id}, {"title", t.title}, {"description", t.description}, {"narrative", t.narrative}};
}

}  // namespace

struct JudgeServer::Impl {
    JudgeStore& store;
    std::map<int, Topic> topics;
    std::map<std::string, Document, std::less<>> documents;
    ExportRule rule;
    httplib::Server server;
    std::jthread thread;
    int port = -1;

    Impl(JudgeStore& s, std::vector<Topic> ts, std::vector<Document> docs, ExportRule r) : store(s), rule(r)
    {
        for (auto& t : ts) topics.emplace(t.topic_id, std::move(t));
        for (auto& d : docs) documents.emplace(d.docno, std::move(d));
        routes();
    }

    // Runs `handler` for an authenticated assessor and maps library errors to statuses.
    template <class Fn>
    httplib::Server::Handler guarded(Fn handler, bool auth = true)
    {
        return [this, handler, auth](const httplib::Request& req, httplib::Response& res) {
            std::string assessor;
            if (auth) {
                const auto header = req.get_header_value("Authorization");
                const std::string prefix = "Bearer ";
                const auto who = header.rfind(prefix, 0) == 0 ? store.authenticate(header.substr(prefix.size()))
                                                              : std::nullopt;
                if (!who) {
                    fail(res, 401, "missing or unknown bearer token");
                    return;
                }
                assessor = *who;
            }
            try {
                handler(req, res, assessor);
            } catch (const MissingGradesError& e) {
                fail(res, 400, e.what(), {{"missing", e.missing()}});
            } catch (const json::exception& e) {
                fail(res, 400, std::string("malformed request body: ") + e.what());
            } catch (const ValidationError& e) {
                fail(res, 400, e.what());
            } catch (const ParseError& e) {
                fail(res, 400, e.what());
            } catch (const ForbiddenError& e) {
                fail(res, 403, e.what());
            } catch (const NotFoundError& e) {
                fail(res, 404, e.what());
            } catch (const ConflictError& e) {
                fail(res, 409, e.what());
            } catch (const std::out_of_range&) {
                fail(res, 404, "no such resource");
            } catch (const std::exception& e) {
                fail(res, 500, e.what());
            }
        };
    }

    void routes()
    {
        server.Get("/health", guarded([](const auto&, auto& res, const auto&) { reply(res, 200, {{"status", "ok"}}); },
                                      false));

        server.Get("/topics", guarded([this](const auto&, auto& res, const std::string& who) {
            json list = json::array();
            for (const auto& p : store.pools().pools) {
                json t = topics.contains(p.topic_id) ? topic_json(topics.at(p.topic_id)) : json{{"topic_id", p.topic_id}};
                t["pool_size"] = p.entries.size();
                t["completed"] = store.locked(who, p.topic_id);
                list.push_back(std::move(t));
            }
            reply(res, 200, {{"assessor", who}, {"topics", std::move(list)}});
        }));

        server.Get(R"(/topics/(\d+)/pool)", guarded([this](const auto& req, auto& res, const std::string& who) {
            const int id = std::stoi(req.matches[1]);
            const auto* p = store.pool(id);
            if (!p) throw NotFoundError("no pool for topic " + std::to_string(id));
            json docs = json::array();
            for (const auto& e : p->entries) {
                json d{{"docno", e.docno}};
                if (const auto it = documents.find(e.docno); it != documents.end()) {
                    d["title"] = it->second.title;
                    d["content"] = it->second.content;
                }
                docs.push_back(std::move(d));
            }
            json body{{"topic_id", id}, {"documents", std::move(docs)}, {"locked", store.locked(who, id)}};
            if (topics.contains(id)) body["topic"] = topic_json(topics.at(id));
            if (store.locked(who, id)) body["grades"] = store.submitted(who, id);
            reply(res, 200, std::move(body));
        }));

        server.Post(R"(/topics/(\d+)/judgments)", guarded([this](const auto& req, auto& res, const std::string& who) {
            const int id = std::stoi(req.matches[1]);
            const auto body = json::parse(req.body);
            const auto grades = body.at("grades").template get<std::map<std::string, int>>();
            const auto r = store.submit(who, id, grades, req.get_header_value("Idempotency-Key"));
            reply(res, r.duplicate ? 200 : 201,
                  {{"topic_id", id}, {"accepted", r.accepted}, {"duplicate", r.duplicate}, {"locked", true},
                   {"seq", r.seq}});
        }));

        server.Get("/ties", guarded([this](const auto&, auto& res, const std::string& who) {
            const auto agg = store.aggregation();
            const auto records = store.records();
            json list = json::array();
            for (const auto& t : agg.ties) {
                bool voted = false;
                for (const auto& r : records) {
                    voted = voted || (r.round == 2 && r.assessor == who && r.topic_id == t.topic_id && r.docno == t.docno);
                }
                list.push_back({{"pair", std::to_string(t.topic_id) + ":" + t.docno},
                                {"topic_id", t.topic_id},
                                {"docno", t.docno},
                                {"options", t.options},
                                {"histogram", t.histogram},
                                {"round2_votes", t.round2.size()},
                                {"voted", voted}});
            }
            reply(res, 200, {{"ties", std::move(list)}});
        }));

        server.Post(R"(/ties/(\d+):([^/]+)/resolution)",
                    guarded([this](const auto& req, auto& res, const std::string& who) {
                        const int id = std::stoi(req.matches[1]);
                        const std::string docno = req.matches[2];
                        const auto body = json::parse(req.body);
                        const auto r = store.resolve_tie(who, id, docno, body.at("grade").template get<int>(),
                                                         req.get_header_value("Idempotency-Key"));
                        reply(res, r.duplicate ? 200 : 201,
                              {{"pair", std::to_string(id) + ":" + docno}, {"duplicate", r.duplicate}, {"seq", r.seq}});
                    }));

        server.Get("/agreement", guarded([this](const auto&, auto& res, const std::string&) {
            const auto rep = agreement(store.records());
            json pairs = json::array();
            for (const auto& p : rep.pairs) {
                pairs.push_back({{"a", p.a}, {"b", p.b}, {"kappa", p.kappa}, {"shared", p.shared}});
            }
            reply(res, 200,
                  {{"assessors", rep.assessors},
                   {"pairs", std::move(pairs)},
                   {"average", rep.average ? json(*rep.average) : json(nullptr)}});
        }));

        server.Get("/export/qrels", guarded([this](const auto& req, auto& res, const std::string&) {
            const bool partial = req.get_param_value("allow_pending") == "1";
            const auto ex = export_qrels(store.aggregation(), rule, partial);
            std::ostringstream text;
            write_qrels(text, ex.qrels);
            json excluded = json::array();
            for (const auto& e : ex.excluded) excluded.push_back({{"topic_id", e.topic_id}, {"relevant", e.relevant}});
            reply(res, 200,
                  {{"qrels", text.str()},
                   {"kept", ex.kept},
                   {"excluded", std::move(excluded)},
                   {"pending", ex.pending},
                   {"grade_histogram", ex.histogram},
                   {"report", ex.report()}});
        }));
    }
};

JudgeServer::JudgeServer(JudgeStore& store, std::vector<Topic> topics, std::vector<Document> documents,
                         ExportRule rule)
    : m_impl(std::make_unique<Impl>(store, std::move(topics), std::move(documents), rule))
{}

JudgeServer::~JudgeServer()
{
    stop();
}

int JudgeServer::bind(const std::string& host, int port)
{
    if (port == 0) {
        m_impl->port = m_impl->server.bind_to_any_port(host);
    } else if (m_impl->server.bind_to_port(host, port)) {
        m_impl->port = port;
    } else {
        m_impl->port = -1;
    }
    if (m_impl->port < 0) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    return m_impl->port;
}

void JudgeServer::run()
{
    m_impl->server.listen_after_bind();
}

int JudgeServer::start(const std::string& host, int port)
{
    if (m_impl->port < 0) bind(host, port);
    m_impl->thread = std::jthread([this] { run(); });
    m_impl->server.wait_until_ready();
    return m_impl->port;
}

void JudgeServer::stop()
{
    if (!m_impl) return;
    m_impl->server.stop();
    if (m_impl->thread.joinable()) m_impl->thread.join();
}

}  // namespace tetun
