#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tetun/corpus.hpp"
#include "tetun/judge.hpp"
#include "tetun/judge_store.hpp"

namespace tetun {

inline constexpr int api_schema_version = 1;

/// HTTP + JSON front end for a JudgeStore. Every request except GET /health needs
/// `Authorization: Bearer <token>`; every response body is JSON with schema_version.
///
///   GET  /topics                          topics with the caller's completion state
///   GET  /topics/{id}/pool                pooled documents; the caller's grades once locked
///   POST /topics/{id}/judgments           {"grades": {docno: grade}}; Idempotency-Key header optional
///   GET  /ties                            open ties with their two options
///   POST /ties/{topic}:{docno}/resolution {"grade": g}
///   GET  /agreement                       pairwise kappa and the average
///   GET  /export/qrels[?allow_pending=1]  qrels text plus exclusion report
class JudgeServer {
  public:
    JudgeServer(JudgeStore& store, std::vector<Topic> topics, std::vector<Document> documents = {},
                ExportRule rule = {});
    ~JudgeServer();
    JudgeServer(const JudgeServer&) = delete;
    JudgeServer& operator=(const JudgeServer&) = delete;

    /// Binds the listening socket; port 0 picks a free one. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void run();
    /// bind() if needed, then serve on a background thread.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> m_impl;
};

}  // namespace tetun
