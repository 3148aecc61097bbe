#include "pse/service.hpp"

#include <cmath>
#include <mutex>
#include <set>

#include "codec.hpp"
#include "httplib.h"
#include "pse/error.hpp"

namespace pse {
namespace {

using codec::json;

constexpr std::size_t kSnippetBytes = 240;

struct HttpError : std::runtime_error {
    HttpError(int s, const std::string& what) : std::runtime_error(what), status(s) {}
    int status;
};

HttpReply reply(int status, const json& j) { return {status, j.dump()}; }

HttpReply error_reply(int status, const std::string& message) { return reply(status, json{{"error", message}}); }

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::size_t i = 0;
    const std::size_t end = path.find('?');
    const std::string p = path.substr(0, end);
    while (i < p.size()) {
        auto j = p.find('/', i);
        if (j == std::string::npos) {
            j = p.size();
        }
        if (j > i) {
            parts.push_back(p.substr(i, j - i));
        }
        i = j + 1;
    }
    return parts;
}

json parse_body(const std::string& body)
{
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw HttpError(400, std::string("request body is not valid JSON: ") + e.what());
    }
}

// Cuts at a word boundary without splitting a UTF-8 sequence.
std::string snippet(const std::string& text)
{
    if (text.size() <= kSnippetBytes) {
        return text;
    }
    std::size_t cut = kSnippetBytes;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) {
        --cut;
    }
    if (auto space = text.rfind(' ', cut); space != std::string::npos && space > kSnippetBytes / 2) {
        cut = space;
    }
    return text.substr(0, cut) + "...";
}

const json* member(const json& j, const char* key)
{
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::string string_member(const json& j, const char* key, bool required)
{
    const json* v = member(j, key);
    if (v == nullptr) {
        if (required) {
            throw HttpError(400, std::string("missing '") + key + "'");
        }
        return {};
    }
    if (!v->is_string()) {
        throw HttpError(400, std::string("'") + key + "' must be a string");
    }
    return v->get<std::string>();
}

}  // namespace

struct Service::Http {
    httplib::Server server;
};

Service::Service(ServiceData data, ServiceOptions options)
    : data_(std::move(data)),
      options_(std::move(options)),
      snapshot_(std::make_shared<const ProfileMap>(std::move(data_.profiles)))
{
    data_.profiles.clear();
    resources_ = {&data_.corpus, &data_.background, data_.embeddings ? &*data_.embeddings : nullptr};
}

Service::~Service() = default;

std::shared_ptr<const ProfileMap> Service::profiles() const
{
    std::shared_lock lock(snapshot_mutex_);
    return snapshot_;
}

HttpReply Service::handle(const std::string& method, const std::string& path, const std::string& body) const
{
    try {
        const auto parts = split_path(path);
        if (parts.empty() || parts[0] != "api") {
            return error_reply(404, "no such endpoint: " + path);
        }
        auto only = [&](const char* allowed) {
            if (method != allowed) {
                throw HttpError(405, "method " + method + " not allowed on " + path);
            }
        };
        if (parts.size() == 2 && parts[1] == "queries") {
            only("GET");
            return get_queries();
        }
        if (parts.size() == 2 && parts[1] == "users") {
            only("GET");
            return get_users();
        }
        if (parts.size() == 4 && parts[1] == "users" && parts[3] == "profile") {
            if (method == "GET") {
                return get_profile(parts[2]);
            }
            only("PUT");
            return put_profile(parts[2], body);
        }
        if (parts.size() == 2 && parts[1] == "rerank") {
            only("POST");
            return post_rerank(body);
        }
        if (parts.size() == 3 && parts[1] == "docs") {
            only("GET");
            return get_doc(parts[2]);
        }
        return error_reply(404, "no such endpoint: " + path);
    } catch (const HttpError& e) {
        return error_reply(e.status, e.what());
    } catch (const ConfigError& e) {
        return error_reply(422, e.what());
    } catch (const EmptyProfileError& e) {
        return error_reply(422, e.what());
    } catch (const Error& e) {
        return error_reply(400, e.what());
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

HttpReply Service::get_queries() const
{
    json out = json::array();
    for (const auto& p : data_.pools) {
        out.push_back({{"query_id", p.query_id}, {"query_text", p.query_text}});
    }
    return reply(200, out);
}

HttpReply Service::get_users() const
{
    const auto snap = profiles();
    json out = json::array();
    for (const auto& [id, p] : *snap) {
        out.push_back(id);
    }
    return reply(200, out);
}

HttpReply Service::get_profile(const std::string& user_id) const
{
    const auto snap = profiles();
    auto it = snap->find(user_id);
    if (it == snap->end()) {
        throw HttpError(404, "unknown user '" + user_id + "'");
    }
    return reply(200, codec::profile_to_json(it->second, true));
}

HttpReply Service::put_profile(const std::string& user_id, const std::string& body) const
{
    json j = parse_body(body);
    if (!j.is_object()) {
        throw HttpError(400, "profile must be a JSON object");
    }
    if (!j.contains("user_id")) {
        j["user_id"] = user_id;
    }
    UserProfile updated = codec::profile_from_json(j, "request body");
    if (updated.user_id != user_id) {
        throw HttpError(400, "user_id '" + updated.user_id + "' does not match the path");
    }

    std::lock_guard writer(write_mutex_);
    const auto current = profiles();
    auto it = current->find(user_id);
    if (it == current->end()) {
        throw HttpError(404, "unknown user '" + user_id + "'");
    }
    if (!j.contains("entities")) {
        // Entity descriptions come from the entities file; keep them unless replaced.
        updated.entities = it->second.entities;
    }
    auto next = std::make_shared<ProfileMap>(*current);
    (*next)[user_id] = updated;
    if (!options_.profiles_path.empty()) {
        save_profiles(*next, options_.profiles_path);
    }
    {
        std::unique_lock lock(snapshot_mutex_);
        snapshot_ = std::move(next);
    }
    return reply(200, codec::profile_to_json(updated, true));
}

HttpReply Service::get_doc(const std::string& doc_id) const
{
    const auto* d = data_.corpus.find(doc_id);
    if (d == nullptr) {
        throw HttpError(404, "unknown document '" + doc_id + "'");
    }
    return reply(200, json{{"doc_id", d->doc_id},
                           {"title", d->title},
                           {"summary", d->summary},
                           {"comments", d->comments},
                           {"length", d->length}});
}

HttpReply Service::post_rerank(const std::string& body) const
{
    static const std::set<std::string> known = {"user_id", "query_id", "ranker", "variant", "lambda", "mu", "k"};
    const json j = parse_body(body);
    if (!j.is_object()) {
        throw HttpError(400, "rerank request must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw HttpError(400, "unknown request field '" + key + "'");
        }
    }
    const auto user_id = string_member(j, "user_id", true);
    const auto query_id = string_member(j, "query_id", true);

    RankerSpec ranker = options_.defaults;
    if (auto name = string_member(j, "ranker", false); !name.empty()) {
        auto kind = parse_ranker(name);
        if (!kind) {
            throw HttpError(400, "unknown ranker '" + name + "' (expected lm, lm-wv or bm25)");
        }
        ranker.kind = *kind;
    }
    Personalization personalization = ProfileVariant::Full;
    std::string variant = "full";
    if (auto name = string_member(j, "variant", false); !name.empty()) {
        variant = name;
        if (name == "query") {
            personalization.reset();
        } else if (auto v = parse_variant(name)) {
            personalization = *v;
        } else {
            throw HttpError(400, "unknown variant '" + name + "'");
        }
    }
    if (const json* v = member(j, "lambda")) {
        if (!v->is_number()) {
            throw HttpError(400, "'lambda' must be a number");
        }
        ranker.lm.lambda = v->get<double>();
    }
    if (const json* v = member(j, "mu")) {
        if (v->is_string() && v->get<std::string>() == "auto") {
            ranker.lm.mu.reset();
        } else if (v->is_number()) {
            ranker.lm.mu = v->get<double>();
        } else {
            throw HttpError(400, "'mu' must be a number or \"auto\"");
        }
    }
    std::size_t k = options_.default_k;
    if (const json* v = member(j, "k")) {
        if (!v->is_number_integer()) {
            throw HttpError(400, "'k' must be an integer");
        }
        if (v->get<long long>() < 1) {
            throw ConfigError("k must be at least 1");
        }
        k = v->get<std::size_t>();
    }
    ranker.lm.validate();
    ranker.bm25.validate();
    if (ranker.kind == RankerKind::LMWithEmbeddings && resources_.embeddings == nullptr) {
        throw ConfigError("the lm-wv ranker needs an embeddings table; start the service with --embeddings");
    }

    const CandidatePool* pool = nullptr;
    for (const auto& p : data_.pools) {
        if (p.query_id == query_id) {
            pool = &p;
        }
    }
    if (pool == nullptr) {
        throw HttpError(404, "unknown query '" + query_id + "'");
    }
    const auto snap = profiles();
    auto it = snap->find(user_id);
    if (it == snap->end()) {
        throw HttpError(404, "unknown user '" + user_id + "'");
    }

    const auto result = rerank_explained(*pool, resources_, ranker, user_id, &it->second, personalization);
    json results = json::array();
    const std::size_t n = std::min(k, result.run.entries.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = result.run.entries[i];
        const auto& d = data_.corpus.at(e.doc_id);
        json expl = json::array();
        for (const auto& tc : result.explanations[i]) {
            expl.push_back({{"term", tc.term}, {"source", tc.source}, {"contribution", tc.contribution}});
        }
        results.push_back({{"rank", e.rank},
                           {"doc_id", e.doc_id},
                           {"title", d.title},
                           {"snippet", snippet(d.summary)},
                           {"score", e.score},
                           {"explanation", std::move(expl)}});
    }
    json out = {{"user_id", user_id},
                {"query_id", query_id},
                {"ranker", std::string(ranker_name(ranker.kind))},
                {"variant", variant},
                {"pool_size", pool->doc_ids.size()},
                {"results", std::move(results)}};
    if (ranker.kind != RankerKind::BM25) {
        out["lambda"] = personalization ? ranker.lm.lambda : 1.0;
        out["mu"] = result.mu ? json(*result.mu) : json(nullptr);
    }
    return reply(200, out);
}

int Service::bind(const std::string& host, int port)
{
    if (!http_) {
        http_ = std::make_unique<Http>();
        auto route = [this](const httplib::Request& req, httplib::Response& res) {
            const auto r = handle(req.method, req.path, req.body);
            res.status = r.status;
            res.set_content(r.body, "application/json; charset=utf-8");
        };
        http_->server.Get("/api/.*", route);
        http_->server.Put("/api/.*", route);
        http_->server.Post("/api/.*", route);
        http_->server.Delete("/api/.*", route);
        if (!options_.static_dir.empty() && !http_->server.set_mount_point("/", options_.static_dir)) {
            throw Error("static directory '" + options_.static_dir + "' does not exist");
        }
    }
    if (port == 0) {
        const int bound = http_->server.bind_to_any_port(host);
        if (bound < 0) {
            throw Error("cannot bind to " + host);
        }
        return bound;
    }
    if (!http_->server.bind_to_port(host, port)) {
        throw Error("cannot bind to " + host + ":" + std::to_string(port));
    }
    return port;
}

void Service::listen()
{
    if (!http_) {
        throw Error("Service::listen() called before bind()");
    }
    http_->server.listen_after_bind();
}

void Service::stop()
{
    if (http_) {
        http_->server.stop();
    }
}

}  // namespace pse
