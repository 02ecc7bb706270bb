#include "meandim/serialize.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace meandim {

namespace {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw JsonInputError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw JsonInputError(std::string("field \"") + key + "\": " + e.what());
  }
}

Json window_json(const Window& x) { return Json{{"origin", x.origin}, {"symbols", x.symbols}}; }
Window window_from_json(const Json& j) { return Window{get<std::string>(j, "symbols"), get<int>(j, "origin")}; }

Json ints(const std::vector<int>& v) { return Json(v); }

}  // namespace

Json vec_json(const Vec& v) { return Json(to_strings(v)); }

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw JsonInputError("expected an array of rationals");
  Vec out;
  for (const auto& e : j) {
    if (!e.is_string()) throw JsonInputError("rationals are written as strings");
    try {
      out.push_back(parse_rational(e.get<std::string>()));
    } catch (const std::invalid_argument& ex) {
      throw JsonInputError(ex.what());
    }
  }
  return out;
}

Json to_json(const SymbolicSystem& sys) {
  Json j;
  j["type"] = "system";
  j["alphabet"] = sys.alphabet();
  j["max_window"] = sys.max_window();
  switch (sys.kind()) {
    case SystemKind::FullShift: j["kind"] = "full_shift"; break;
    case SystemKind::SFT:
      j["kind"] = "sft";
      j["forbidden"] = sys.forbidden();
      break;
    case SystemKind::Substitution: {
      j["kind"] = "substitution";
      Json r = Json::object();
      for (const auto& [a, w] : sys.rule()) r[std::string(1, a)] = w;
      j["rule"] = r;
      break;
    }
    case SystemKind::Rotation:
      j["kind"] = "rotation";
      j["angle"] = to_string(sys.angle());
      j["cuts"] = vec_json(sys.cuts());
      break;
  }
  return j;
}

SymbolicSystem system_from_json(const Json& j) {
  auto kind = get<std::string>(j, "kind");
  auto alphabet = get<std::string>(j, "alphabet");
  int mw = j.contains("max_window") ? get<int>(j, "max_window") : 64;
  try {
    if (kind == "full_shift") return SymbolicSystem::full_shift(alphabet, mw);
    if (kind == "sft") return SymbolicSystem::sft(alphabet, get<std::vector<Word>>(j, "forbidden"), mw);
    if (kind == "substitution") {
      std::map<char, Word> rule;
      for (const auto& [k, v] : get<std::map<std::string, std::string>>(j, "rule")) {
        if (k.size() != 1) throw JsonInputError("rule keys must be single symbols");
        rule[k[0]] = v;
      }
      return SymbolicSystem::substitution(alphabet, rule, mw);
    }
    if (kind == "rotation")
      return SymbolicSystem::rotation(alphabet, parse_rational(get<std::string>(j, "angle")), vec_from_json(j.at("cuts")), mw);
  } catch (const JsonInputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw JsonInputError(std::string("system: ") + e.what());
  }
  throw JsonInputError("unknown system kind \"" + kind + "\"");
}

Json to_json(const CylinderRegion& r) { return Json{{"lo", r.lo()}, {"width", r.width()}, {"words", r.words()}}; }

CylinderRegion region_from_json(const Json& j) {
  try {
    return CylinderRegion(get<int>(j, "lo"), get<int>(j, "width"), get<std::vector<Word>>(j, "words"));
  } catch (const JsonInputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw JsonInputError(std::string("region: ") + e.what());
  }
}

Json to_json(const MarkerCertificate& c) {
  Json j;
  j["type"] = "marker";
  j["system"] = to_json(c.system);
  j["N"] = c.N;
  j["d"] = c.d;
  j["m"] = c.m;
  j["cover_bound"] = c.cover_bound;
  j["W"] = to_json(c.W);
  Json sc = Json::array();
  for (const auto& r : c.start_cover) sc.push_back(to_json(r));
  j["start_cover"] = sc;
  Json steps = Json::array();
  for (const auto& s : c.steps) {
    Json js;
    js["V"] = to_json(s.V);
    js["R"] = to_json(s.R);
    Json pieces = Json::array();
    for (const auto& p : s.pieces) pieces.push_back(to_json(p));
    js["pieces"] = pieces;
    js["hits"] = s.hits;
    js["colors"] = ints(s.colors);
    js["W"] = to_json(s.W);
    steps.push_back(js);
  }
  j["steps"] = steps;
  Json facts = Json::array();
  for (const auto& f : c.facts) facts.push_back(Json{{"kind", f.kind}, {"step", f.step}, {"index", f.index}, {"detail", f.detail}});
  j["facts"] = facts;
  return j;
}

MarkerCertificate marker_from_json(const Json& j) {
  MarkerCertificate c{.system = system_from_json(j.at("system"))};
  c.N = get<int>(j, "N");
  c.d = get<int>(j, "d");
  c.m = get<int>(j, "m");
  c.cover_bound = get<int>(j, "cover_bound");
  c.W = region_from_json(j.at("W"));
  for (const auto& r : get<Json>(j, "start_cover")) c.start_cover.push_back(region_from_json(r));
  for (const auto& js : get<Json>(j, "steps")) {
    InductionStep s;
    s.V = region_from_json(js.at("V"));
    s.R = region_from_json(js.at("R"));
    for (const auto& p : get<Json>(js, "pieces")) s.pieces.push_back(region_from_json(p));
    s.hits = get<std::vector<std::vector<int>>>(js, "hits");
    s.colors = get<std::vector<int>>(js, "colors");
    s.W = region_from_json(js.at("W"));
    c.steps.push_back(std::move(s));
  }
  for (const auto& f : get<Json>(j, "facts"))
    c.facts.push_back(MarkerFact{get<std::string>(f, "kind"), get<int>(f, "step"), get<int>(f, "index"), get<std::string>(f, "detail")});
  return c;
}

Json to_json(const RankCheck& c) {
  return Json{{"name", c.name}, {"rank", c.rank}, {"expected", c.expected}, {"pass", c.pass}};
}

Json to_json(const IndependenceCertificate& c) {
  Json j;
  j["type"] = "independence";
  j["lemma"] = c.lemma;
  j["seed"] = std::to_string(c.seed);
  j["attempts"] = c.attempts;
  j["dim"] = c.dim;
  Json base = Json::array(), sampled = Json::array(), checks = Json::array();
  for (const auto& v : c.base) base.push_back(vec_json(v));
  for (const auto& v : c.sampled) sampled.push_back(vec_json(v));
  for (const auto& k : c.checks) checks.push_back(to_json(k));
  j["base"] = base;
  j["sampled"] = sampled;
  j["checks"] = checks;
  j["pass"] = c.pass;
  return j;
}

IndependenceCertificate certificate_from_json(const Json& j) {
  IndependenceCertificate c;
  c.lemma = get<std::string>(j, "lemma");
  c.seed = std::stoull(get<std::string>(j, "seed"));
  c.attempts = get<int>(j, "attempts");
  c.dim = get<int>(j, "dim");
  for (const auto& v : get<Json>(j, "base")) c.base.push_back(vec_from_json(v));
  for (const auto& v : get<Json>(j, "sampled")) c.sampled.push_back(vec_from_json(v));
  for (const auto& k : get<Json>(j, "checks"))
    c.checks.push_back(RankCheck{get<std::string>(k, "name"), get<int>(k, "rank"), get<int>(k, "expected"), get<bool>(k, "pass")});
  c.pass = get<bool>(j, "pass");
  return c;
}

Json to_json(const EmbeddingFunction& f) {
  using Mode = EmbeddingFunction::Mode;
  Json j;
  j["mode"] = mode_name(f.mode);
  j["d"] = f.d;
  switch (f.mode) {
    case Mode::Lookup: {
      j["lo"] = f.lo;
      j["hi"] = f.hi;
      Json t = Json::array();
      for (const auto& [w, v] : f.table) t.push_back(Json{{"word", w}, {"value", vec_json(v)}});
      j["table"] = t;
      j["fallback"] = f.fallback ? vec_json(*f.fallback) : Json(nullptr);
      break;
    }
    case Mode::DirectF:
    case Mode::Rokhlin: {
      Json members = Json::array(), anchors = Json::array(), v = Json::array();
      for (const auto& m : f.pou->members()) members.push_back(to_json(m));
      for (const auto& a : f.pou->anchors()) anchors.push_back(window_json(a));
      for (const auto& x : f.F.v) v.push_back(vec_json(x));
      j["cover"] = Json{{"members", members}, {"anchors", anchors}};
      j["F"] = Json{{"n", f.F.n}, {"d", f.F.d}, {"v", v}};
      if (f.mode == Mode::Rokhlin) {
        if (!f.rokhlin->marker || !f.rokhlin->integer_valued) throw std::invalid_argument("only marker-based Rokhlin functions serialize");
        j["M"] = f.M;
        j["rokhlin"] = Json{{"marker", to_json(*f.rokhlin->marker)}, {"height", f.rokhlin->height}, {"depth", f.rokhlin->depth}};
      }
      break;
    }
    case Mode::Clamp: {
      j["base"] = to_json(*f.base);
      Json p = Json::array();
      for (const auto& [r, g] : f.patches) p.push_back(Json{{"region", to_json(r)}, {"offset", vec_json(g)}});
      j["patches"] = p;
      break;
    }
    case Mode::Composed: {
      j["g"] = to_json(*f.base);
      j["h"] = to_json(*f.h);
      Json t = Json::object();
      for (const auto& [w, c] : f.code->table) t[w] = std::string(1, c);
      j["code"] = Json{{"lo", f.code->lo}, {"hi", f.code->hi}, {"target_alphabet", f.code->target_alphabet}, {"table", t}};
      break;
    }
  }
  j["params"] = f.params;
  return j;
}

EmbeddingFunction function_from_json(const Json& j, const SymbolicSystem& sys) {
  using Mode = EmbeddingFunction::Mode;
  EmbeddingFunction f;
  auto mode = get<std::string>(j, "mode");
  f.d = get<int>(j, "d");
  if (j.contains("params")) f.params = get<std::map<std::string, std::string>>(j, "params");
  if (mode == "lookup") {
    f.mode = Mode::Lookup;
    f.lo = get<int>(j, "lo");
    f.hi = get<int>(j, "hi");
    for (const auto& e : get<Json>(j, "table")) f.table[get<std::string>(e, "word")] = vec_from_json(e.at("value"));
    if (j.contains("fallback") && !j.at("fallback").is_null()) f.fallback = vec_from_json(j.at("fallback"));
  } else if (mode == "direct-F" || mode == "rokhlin-interpolated") {
    f.mode = mode == "direct-F" ? Mode::DirectF : Mode::Rokhlin;
    const auto& cover = get<Json>(j, "cover");
    std::vector<CylinderRegion> members;
    std::vector<Window> anchors;
    for (const auto& m : get<Json>(cover, "members")) members.push_back(region_from_json(m));
    for (const auto& a : get<Json>(cover, "anchors")) anchors.push_back(window_from_json(a));
    f.pou = std::make_shared<PartitionOfUnity>(sys, std::move(members), std::move(anchors));
    const auto& F = get<Json>(j, "F");
    f.F.n = get<int>(F, "n");
    f.F.d = get<int>(F, "d");
    for (const auto& v : get<Json>(F, "v")) f.F.v.push_back(vec_from_json(v));
    if (f.F.v.size() != f.pou->size()) throw JsonInputError("F: one vertex per cover member");
    for (const auto& v : f.F.v)
      if (static_cast<int>(v.size()) != f.F.n * f.F.d) throw JsonInputError("F: vertex length mismatch");
    if (f.mode == Mode::Rokhlin) {
      f.M = get<int>(j, "M");
      const auto& r = get<Json>(j, "rokhlin");
      f.rokhlin = rokhlin_from_region(region_from_json(r.at("marker")), get<int>(r, "height"), get<int>(r, "depth"));
    }
  } else if (mode == "clamp") {
    f.mode = Mode::Clamp;
    f.base = std::make_shared<EmbeddingFunction>(function_from_json(get<Json>(j, "base"), sys));
    for (const auto& p : get<Json>(j, "patches")) f.patches.push_back({region_from_json(p.at("region")), vec_from_json(p.at("offset"))});
  } else if (mode == "composed") {
    f.mode = Mode::Composed;
    f.base = std::make_shared<EmbeddingFunction>(function_from_json(get<Json>(j, "g"), sys));
    f.h = std::make_shared<EmbeddingFunction>(function_from_json(get<Json>(j, "h"), sys));
    const auto& c = get<Json>(j, "code");
    SlidingCode code;
    code.lo = get<int>(c, "lo");
    code.hi = get<int>(c, "hi");
    code.target_alphabet = get<std::string>(c, "target_alphabet");
    for (const auto& [w, s] : get<std::map<std::string, std::string>>(c, "table")) code.table[w] = s.at(0);
    f.code = code;
  } else {
    throw JsonInputError("unknown function mode \"" + mode + "\"");
  }
  return f;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Report line and column of the failing byte.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte - (e.byte > 0 ? 1 : 0) && i < text.size(); ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    throw JsonInputError(where + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) { return parse_json_text(read_file(path), path); }

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return ss.str();
}

}  // namespace meandim
