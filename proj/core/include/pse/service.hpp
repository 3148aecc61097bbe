#pragma once

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pse/corpus.hpp"
#include "pse/embeddings.hpp"
#include "pse/profiles.hpp"
#include "pse/rankers.hpp"
#include "pse/text.hpp"

namespace pse {

struct ServiceData {
    Corpus corpus;
    BackgroundLM background;
    std::optional<EmbeddingTable> embeddings;
    std::vector<CandidatePool> pools;
    ProfileMap profiles;
};

struct ServiceOptions {
    /// Profiles file rewritten on every successful PUT; empty keeps updates in memory.
    std::string profiles_path;
    /// Directory served at "/" (e.g. a built web UI); empty disables it.
    std::string static_dir;
    /// Defaults applied to POST /api/rerank before the request body.
    RankerSpec defaults;
    std::size_t default_k = 10;
};

struct HttpReply {
    int status = 200;
    std::string body;
};

/// JSON API over an immutable corpus and a mutable profile store.
///
/// Endpoints:
///   GET  /api/queries
///   GET  /api/users
///   GET  /api/users/{id}/profile
///   PUT  /api/users/{id}/profile
///   POST /api/rerank
///   GET  /api/docs/{id}
///
/// handle() is transport independent and safe to call from many threads.
class Service {
  public:
    Service(ServiceData data, ServiceOptions options);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    HttpReply handle(const std::string& method, const std::string& path, const std::string& body) const;

    /// Binds the HTTP listener. Port 0 picks a free port; returns the port.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Requires bind().
    void listen();
    void stop();

    std::shared_ptr<const ProfileMap> profiles() const;

  private:
    HttpReply get_profile(const std::string& user_id) const;
    HttpReply put_profile(const std::string& user_id, const std::string& body) const;
    HttpReply post_rerank(const std::string& body) const;
    HttpReply get_doc(const std::string& doc_id) const;
    HttpReply get_queries() const;
    HttpReply get_users() const;

    ServiceData data_;
    ServiceOptions options_;
    RankingResources resources_;

    mutable std::shared_mutex snapshot_mutex_;
    mutable std::mutex write_mutex_;
    mutable std::shared_ptr<const ProfileMap> snapshot_;

    struct Http;
    std::unique_ptr<Http> http_;
};

}  // namespace pse
