#include "pse/runfile.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "pse/error.hpp"

namespace pse {

void write_run(std::ostream& out, const RunList& run, const std::string& tag)
{
    if (run.user_id.find(':') != std::string::npos) {
        throw Error("user id '" + run.user_id + "' must not contain ':'");
    }
    char score[64];
    for (const auto& e : run.entries) {
        std::snprintf(score, sizeof score, "%.6f", e.score);
        out << run.user_id << ':' << run.query_id << " Q0 " << e.doc_id << ' ' << e.rank << ' ' << score << ' ' << tag
            << '\n';
    }
}

void write_runs(std::ostream& out, const std::vector<RunList>& runs, const std::string& tag)
{
    for (const auto& r : runs) {
        write_run(out, r, tag);
    }
}

std::vector<RunList> read_runs(std::istream& in, const std::string& source)
{
    std::vector<RunList> runs;
    std::map<std::string, std::size_t> by_topic;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string topic, q0, doc, rank, score, tag;
        if (!(fields >> topic)) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        if (!(fields >> q0 >> doc >> rank >> score >> tag)) {
            throw Error(where + ": expected '<user>:<query> Q0 <doc> <rank> <score> <tag>'");
        }
        auto colon = topic.find(':');
        if (colon == std::string::npos) {
            throw Error(where + ": topic '" + topic + "' is not of the form <user>:<query>");
        }
        RunEntry e;
        e.doc_id = doc;
        try {
            std::size_t used = 0;
            e.rank = std::stoul(rank, &used);
            if (used != rank.size()) {
                throw std::invalid_argument(rank);
            }
            e.score = std::stod(score, &used);
            if (used != score.size()) {
                throw std::invalid_argument(score);
            }
        } catch (const std::exception&) {
            throw Error(where + ": invalid rank or score");
        }
        auto [it, inserted] = by_topic.emplace(topic, runs.size());
        if (inserted) {
            runs.push_back({topic.substr(0, colon), topic.substr(colon + 1), {}});
        }
        runs[it->second].entries.push_back(std::move(e));
    }
    return runs;
}

std::vector<RunList> load_runs(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open run file '" + path + "'");
    }
    return read_runs(in, path);
}

}  // namespace pse
