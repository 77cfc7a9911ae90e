#include "storyline/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace storyline {

namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> lineColumn(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  // nlohmann reports the byte after the offending token.
  if (column > 1) --column;
  return {line, column};
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InstanceError(where, std::string("missing field '") + key + "'");
  return *it;
}

long long asInteger(const json& v, const std::string& where) {
  if (!v.is_number_integer()) {
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
    }
    throw InstanceError(where, "expected an integer");
  }
  return v.get<long long>();
}

double asNumber(const json& v, const std::string& where) {
  if (!v.is_number()) throw InstanceError(where, "expected a number");
  return v.get<double>();
}

std::string asString(const json& v, const std::string& where) {
  if (!v.is_string()) throw InstanceError(where, "expected a string");
  return v.get<std::string>();
}

const json& asArray(const json& v, const std::string& where) {
  if (!v.is_array()) throw InstanceError(where, "expected a list");
  return v;
}

}  // namespace

InstanceDocument parseInstanceDocument(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = lineColumn(text, e.byte);
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(line, column, msg);
  }
  if (!doc.is_object()) throw InstanceError("document", "expected an object at top level");

  StorylineInstance base;
  std::unordered_map<std::string, CharIndex> byId;

  const json& orderingsJson = asArray(require(doc, "orderings", "document"), "orderings");
  if (auto it = doc.find("timeSteps"); it != doc.end()) {
    const long long steps = asInteger(*it, "timeSteps");
    if (steps < 0) throw InstanceError("timeSteps", "must be nonnegative");
    base.steps = static_cast<std::size_t>(steps);
  } else {
    base.steps = orderingsJson.size();
  }

  const json& chars = asArray(require(doc, "characters", "document"), "characters");
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const json& cj = chars[i];
    std::string where = "characters[" + std::to_string(i) + "]";
    if (!cj.is_object()) throw InstanceError(where, "expected an object");
    Character ch;
    ch.id = asString(require(cj, "id", where), where + ".id");
    where = "character " + ch.id;
    long long from = 0, to = 0;
    if (auto steps = cj.find("activeSteps"); steps != cj.end()) {
      std::vector<long long> ts;
      for (const auto& v : asArray(*steps, where + ".activeSteps"))
        ts.push_back(asInteger(v, where + ".activeSteps"));
      if (ts.empty()) throw InstanceError(where, "empty activity");
      std::sort(ts.begin(), ts.end());
      for (std::size_t k = 1; k < ts.size(); ++k)
        if (ts[k] != ts[k - 1] + 1) throw InstanceError(where, "activity not contiguous");
      from = ts.front();
      to = ts.back();
    } else {
      from = asInteger(require(cj, "activeFrom", where), where + ".activeFrom");
      to = asInteger(require(cj, "activeTo", where), where + ".activeTo");
    }
    if (from < 1 || to < from || static_cast<std::size_t>(to) > base.steps)
      throw InstanceError(where, "activity interval [" + std::to_string(from) + "," + std::to_string(to) +
                                     "] not within [1," + std::to_string(base.steps) + "]");
    ch.activity = {static_cast<Step>(from - 1), static_cast<Step>(to - 1)};
    if (auto g = cj.find("group"); g != cj.end() && !g->is_null()) ch.group = asString(*g, where + ".group");
    if (!byId.emplace(ch.id, base.characters.size()).second) throw InstanceError(where, "duplicate id");
    base.characters.push_back(std::move(ch));
  }

  const auto lookup = [&](const json& v, const std::string& where) {
    const std::string id = asString(v, where);
    auto it = byId.find(id);
    if (it == byId.end()) throw InstanceError(where, "unknown character '" + id + "'");
    return it->second;
  };

  if (auto mj = doc.find("meetings"); mj != doc.end()) {
    const json& meetings = asArray(*mj, "meetings");
    for (std::size_t i = 0; i < meetings.size(); ++i) {
      const std::string where = "meetings[" + std::to_string(i) + "]";
      if (!meetings[i].is_object()) throw InstanceError(where, "expected an object");
      const long long t = asInteger(require(meetings[i], "t", where), where + ".t");
      if (t < 1 || static_cast<std::size_t>(t) > base.steps)
        throw InstanceError(where, "time step " + std::to_string(t) + " out of range");
      Meeting m;
      m.step = static_cast<Step>(t - 1);
      for (const auto& v : asArray(require(meetings[i], "members", where), where + ".members"))
        m.members.push_back(lookup(v, where + ".members"));
      base.meetings.push_back(std::move(m));
    }
  }

  std::vector<std::vector<CharIndex>> orderings;
  for (std::size_t t = 0; t < orderingsJson.size(); ++t) {
    const std::string where = "orderings[" + std::to_string(t) + "]";
    std::vector<CharIndex> order;
    for (const auto& v : asArray(orderingsJson[t], where)) order.push_back(lookup(v, where));
    orderings.push_back(std::move(order));
  }

  InstanceDocument out;
  if (auto pj = doc.find("params"); pj != doc.end() && !pj->is_null()) {
    if (!pj->is_object()) throw InstanceError("params", "expected an object");
    NicenessParams p;
    if (auto d = pj->find("delta"); d != pj->end()) p.delta = asNumber(*d, "params.delta");
    if (auto d = pj->find("deltaBar"); d != pj->end()) p.deltaBar = asNumber(*d, "params.deltaBar");
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw InstanceError("params", e.what());
    }
    out.params = p;
  }
  out.instance = OrderedStorylineInstance(std::move(base), std::move(orderings));
  return out;
}

OrderedStorylineInstance parseInstance(std::string_view text) {
  return parseInstanceDocument(text).instance;
}

InstanceDocument loadInstance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError(path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseInstanceDocument(buf.str());
}

std::string serializeInstance(const OrderedStorylineInstance& inst,
                              const std::optional<NicenessParams>& params) {
  json doc;
  doc["characters"] = json::array();
  for (CharIndex c = 0; c < inst.characterCount(); ++c) {
    const auto& ch = inst.character(c);
    json cj = {{"id", ch.id}, {"activeFrom", ch.activity.first + 1}, {"activeTo", ch.activity.last + 1}};
    if (!ch.group.empty()) cj["group"] = ch.group;
    doc["characters"].push_back(std::move(cj));
  }
  doc["meetings"] = json::array();
  for (const auto& m : inst.meetings()) {
    json members = json::array();
    for (CharIndex c : m.members) members.push_back(inst.character(c).id);
    doc["meetings"].push_back({{"t", m.step + 1}, {"members", std::move(members)}});
  }
  doc["orderings"] = json::array();
  for (Step t = 0; t < inst.stepCount(); ++t) {
    json order = json::array();
    for (CharIndex c : inst.ordering(t)) order.push_back(inst.character(c).id);
    doc["orderings"].push_back(std::move(order));
  }
  if (params) doc["params"] = {{"delta", params->delta}, {"deltaBar", params->deltaBar}};
  return doc.dump(2) + "\n";
}

}  // namespace storyline
