#include "qdb/instance_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "qdb/error.hpp"

namespace qdb {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::malformed_input, what); }

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) malformed(where + ": missing field '" + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) malformed(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

DocumentRef parse_doc(const json& j, const std::string& where) {
    if (!j.is_object()) malformed(where + ": ranking entry must be an object");
    DocumentRef d;
    d.doc_id = require_string(j, "doc", where);
    if (auto it = j.find("score"); it != j.end()) {
        if (!it->is_number()) malformed(where + ": score of '" + d.doc_id + "' must be a number");
        d.score = it->get<double>();
    }
    if (auto it = j.find("text"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) malformed(where + ": text of '" + d.doc_id + "' must be a string");
        d.text = it->get<std::string>();
    }
    return d;
}

SubQuery parse_subquery(const json& j, const std::string& where) {
    if (!j.is_object()) malformed(where + ": sub-query must be an object");
    SubQuery sq;
    sq.sq_id = require_string(j, "id", where);
    const std::string here = where + " sub-query '" + sq.sq_id + "'";
    if (auto it = j.find("parent"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) malformed(here + ": parent must be a string or null");
        sq.parent_id = it->get<std::string>();
    }
    if (auto it = j.find("text"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) malformed(here + ": text must be a string");
        sq.text = it->get<std::string>();
    }
    const json& ranking = require(j, "ranking", here);
    if (!ranking.is_array()) malformed(here + ": ranking must be an array");
    for (const auto& d : ranking) sq.ranking.push_back(parse_doc(d, here));
    return sq;
}

}  // namespace

RequestInstance parse_instance(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        malformed(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) malformed("instance must be a JSON object");

    RequestInstance inst;
    inst.request_id = require_string(j, "request_id", "instance");
    const std::string where = "request '" + inst.request_id + "'";
    if (auto it = j.find("request_text"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) malformed(where + ": request_text must be a string");
        inst.request_text = it->get<std::string>();
    }
    const json& sqs = require(j, "subqueries", where);
    if (!sqs.is_array()) malformed(where + ": subqueries must be an array");
    for (const auto& sq : sqs) inst.subqueries.push_back(parse_subquery(sq, where));

    const json& judgments = require(j, "judgments", where);
    if (!judgments.is_object()) malformed(where + ": judgments must be an object");
    for (const auto& [doc, rel] : judgments.items()) {
        if (!rel.is_number_integer() && !rel.is_boolean()) malformed(where + ": judgment of '" + doc + "' must be 0 or 1");
        inst.judgments[doc] = rel.is_boolean() ? static_cast<int>(rel.get<bool>()) : rel.get<int>();
    }

    if (auto it = j.find("nuggets"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) malformed(where + ": nuggets must be an object");
        auto& out = inst.nuggets.emplace();
        for (const auto& [doc, ids] : it->items()) {
            if (!ids.is_array()) malformed(where + ": nuggets of '" + doc + "' must be an array");
            auto& set = out[doc];
            for (const auto& n : ids) {
                if (n.is_string()) set.insert(n.get<std::string>());
                else if (n.is_number_integer()) set.insert(std::to_string(n.get<long long>()));
                else malformed(where + ": nugget ids of '" + doc + "' must be strings");
            }
        }
    }
    if (auto it = j.find("embeddings"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) malformed(where + ": embeddings must be an object");
        auto& out = inst.embeddings.emplace();
        for (const auto& [doc, vec] : it->items()) {
            if (!vec.is_array()) malformed(where + ": embedding of '" + doc + "' must be an array");
            auto& v = out[doc];
            v.reserve(vec.size());
            for (const auto& x : vec) {
                if (!x.is_number()) malformed(where + ": embedding of '" + doc + "' must hold numbers");
                v.push_back(x.get<double>());
            }
        }
    }
    return inst;
}

std::string serialize_instance(const RequestInstance& inst) {
    json j;
    j["request_id"] = inst.request_id;
    j["request_text"] = inst.request_text;
    json sqs = json::array();
    for (const auto& sq : inst.subqueries) {
        json s;
        s["id"] = sq.sq_id;
        s["parent"] = sq.parent_id ? json(*sq.parent_id) : json(nullptr);
        s["text"] = sq.text;
        json ranking = json::array();
        for (const auto& d : sq.ranking) {
            json e{{"doc", d.doc_id}, {"score", d.score}};
            if (d.text) e["text"] = *d.text;
            ranking.push_back(std::move(e));
        }
        s["ranking"] = std::move(ranking);
        sqs.push_back(std::move(s));
    }
    j["subqueries"] = std::move(sqs);
    j["judgments"] = json::object();
    for (const auto& [doc, rel] : inst.judgments) j["judgments"][doc] = rel;
    if (inst.nuggets) {
        j["nuggets"] = json::object();
        for (const auto& [doc, ids] : *inst.nuggets) j["nuggets"][doc] = ids;
    }
    if (inst.embeddings) {
        j["embeddings"] = json::object();
        for (const auto& [doc, v] : *inst.embeddings) j["embeddings"][doc] = v;
    }
    return j.dump();
}

std::vector<RequestInstance> read_instances(std::istream& in, std::vector<std::size_t>* line_numbers) {
    std::vector<RequestInstance> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            out.push_back(parse_instance(line));
            if (line_numbers) line_numbers->push_back(line_no);
        } catch (const Error& e) {
            throw Error(ErrorCode::malformed_input, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<RequestInstance> load_instances(const std::string& path, std::vector<std::size_t>* line_numbers) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::malformed_input, "cannot open '" + path + "'");
    return read_instances(in, line_numbers);
}

void write_instances(std::ostream& out, const std::vector<RequestInstance>& instances) {
    for (const auto& inst : instances) out << serialize_instance(inst) << '\n';
}

}  // namespace qdb
