#pragma once

// Serialization of towers, actions, classes and SNC models as structured
// text (JSON).  Writers emit keys in a fixed order and normalize values, so
// serialize(parse(serialize(x))) is byte-identical to serialize(x).
// Coefficients are JSON integers when they fit in 64 bits and decimal
// strings beyond that.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "motivic/action.hpp"
#include "motivic/common.hpp"
#include "motivic/gfq.hpp"
#include "motivic/mclass.hpp"
#include "motivic/nearby.hpp"

namespace motivic::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// primitives
// ---------------------------------------------------------------------------

inline json integer_to_json(const Integer& v) {
  if (v.fits_slong_p()) return json(v.get_si());
  return json(v.get_str());
}

inline Integer integer_from_json(const json& j) {
  if (j.is_number_integer()) return Integer(static_cast<long>(j.get<long long>()));
  if (j.is_string()) {
    try {
      return Integer(j.get<std::string>());
    } catch (...) {
      fail(Errc::ParseError, "invalid integer literal '" + j.get<std::string>() + "'");
    }
  }
  fail(Errc::ParseError, "expected an integer");
}

inline json poly_to_json(const mclass::LefschetzPoly& f) {
  json terms = json::array();
  for (const auto& [e, c] : f.terms) terms.push_back(json::array({e, integer_to_json(c)}));
  return terms;
}

inline mclass::LefschetzPoly poly_from_json(const json& j) {
  require(j.is_array(), Errc::ParseError, "coefficient list must be an array");
  mclass::LefschetzPoly f;
  for (const auto& t : j) {
    require(t.is_array() && t.size() == 2, Errc::ParseError,
            "coefficient entries are [exponent, coefficient] pairs");
    f.add_term(t[0].get<int>(), integer_from_json(t[1]));
  }
  return f;
}

// ---------------------------------------------------------------------------
// motivic classes
// ---------------------------------------------------------------------------

inline json class_to_json(const mclass::MotivicClass& c) {
  json doc;
  doc["ring"] = c.tag().to_string();
  json terms = json::array();
  for (const auto& [mono, coeff] : c.body()) {
    json term;
    term["symbols"] = mono.syms;
    term["coeffs"] = poly_to_json(coeff);
    terms.push_back(std::move(term));
  }
  doc["terms"] = std::move(terms);
  return doc;
}

inline mclass::MotivicClass class_from_json(const json& doc) {
  require(doc.is_object() && doc.contains("ring") && doc.contains("terms"), Errc::ParseError,
          "class document needs 'ring' and 'terms'");
  auto tag = mclass::RingTag::parse(doc["ring"].get<std::string>());
  require(tag.has_value(), Errc::ParseError,
          "unknown ring tag '" + doc["ring"].get<std::string>() + "'");
  mclass::MotivicClass c(*tag);
  for (const auto& term : doc["terms"]) {
    mclass::Monomial mono;
    for (const auto& s : term.at("symbols")) mono = mono * mclass::Monomial::single(s);
    c.add_term(mono, poly_from_json(term.at("coeffs")));
  }
  return c;
}

// ---------------------------------------------------------------------------
// towers and field elements
// ---------------------------------------------------------------------------

inline json tower_to_json(const gfq::FieldTower& t) {
  json doc;
  doc["p"] = t.p();
  doc["degrees"] = t.step_degrees();
  json moduli = json::array();
  long deg = 1;
  moduli.push_back(t.modulus(t.index_by_degree(1)).c);
  for (int s : t.step_degrees()) {
    deg *= s;
    moduli.push_back(t.modulus(t.index_by_degree(static_cast<int>(deg))).c);
  }
  doc["moduli"] = std::move(moduli);
  return doc;
}

inline gfq::FieldTower tower_from_json(const json& doc) {
  require(doc.is_object() && doc.contains("p") && doc.contains("degrees"), Errc::ParseError,
          "tower document needs 'p' and 'degrees'");
  int p = doc["p"].get<int>();
  std::vector<int> degrees = doc["degrees"].get<std::vector<int>>();
  if (!doc.contains("moduli")) return gfq::FieldTower(p, degrees);
  std::vector<gfq::PolyFp> moduli;
  for (const auto& m : doc["moduli"]) {
    gfq::PolyFp f{p, m.get<std::vector<int>>()};
    f.trim();
    moduli.push_back(std::move(f));
  }
  return gfq::FieldTower::from_serialized(p, degrees, moduli);
}

inline json element_to_json(const gfq::FieldElement& e) { return json(e.coords); }

inline gfq::FieldElement element_from_json(const gfq::FieldTower& t, int level, const json& j) {
  require(j.is_array(), Errc::ParseError, "field element must be a coordinate array");
  return t.from_coords(level, j.get<std::vector<int>>());
}

// ---------------------------------------------------------------------------
// actions
// ---------------------------------------------------------------------------

inline json action_to_json(const action::Action& a) {
  json doc;
  doc["tower"] = tower_to_json(a.tower);
  doc["group"] = json{{"wild", a.group.wild_orders}, {"tame", a.group.tame_orders}};
  doc["dimension"] = a.dim;
  json gens = json::array();
  for (const auto& g : a.generators) {
    json gj;
    gj["twist"] = g.twist;
    gj["order"] = g.declared_order;
    json mat = json::array();
    for (const auto& e : g.matrix) mat.push_back(element_to_json(e));
    gj["matrix"] = std::move(mat);
    json tr = json::array();
    for (const auto& e : g.translation) tr.push_back(element_to_json(e));
    gj["translation"] = std::move(tr);
    gens.push_back(std::move(gj));
  }
  doc["generators"] = std::move(gens);
  return doc;
}

inline action::Action action_from_json(const json& doc) {
  require(doc.is_object(), Errc::ParseError, "action document must be an object");
  action::Action a;
  a.tower = tower_from_json(doc.at("tower"));
  a.group.wild_orders = doc.at("group").at("wild").get<std::vector<long>>();
  a.group.tame_orders = doc.at("group").at("tame").get<std::vector<long>>();
  a.dim = doc.at("dimension").get<int>();
  require(a.dim >= 0, Errc::ParseError, "dimension must be nonnegative");
  int K = a.tower.K_index();
  for (const auto& gj : doc.at("generators")) {
    action::Generator g;
    g.twist = gj.at("twist").get<long>();
    g.declared_order = gj.at("order").get<long>();
    require(gj.at("matrix").size() == static_cast<size_t>(a.dim) * a.dim, Errc::ParseError,
            "matrix entry count does not match the dimension");
    require(gj.at("translation").size() == static_cast<size_t>(a.dim), Errc::ParseError,
            "translation entry count does not match the dimension");
    for (const auto& e : gj.at("matrix")) g.matrix.push_back(element_from_json(a.tower, K, e));
    for (const auto& e : gj.at("translation"))
      g.translation.push_back(element_from_json(a.tower, K, e));
    a.generators.push_back(std::move(g));
  }
  return a;
}

// ---------------------------------------------------------------------------
// SNC models
// ---------------------------------------------------------------------------

inline json model_to_json(const nearby::SncModel& m) {
  json doc;
  json comps = json::array();
  for (const auto& c : m.components) comps.push_back(json{{"name", c.name}, {"N", c.multiplicity}});
  doc["components"] = std::move(comps);
  json symbols = json::array();
  for (const auto& name : m.symbols.names()) {
    const auto& info = m.symbols.info(name);
    json sj;
    sj["name"] = name;
    if (info.action_tag > 0) sj["mu"] = info.action_tag;
    if (!info.note.empty()) sj["note"] = info.note;
    symbols.push_back(std::move(sj));
  }
  doc["symbols"] = std::move(symbols);
  json strata = json::array();
  for (const auto& st : m.strata) {
    json sj;
    json subset = json::array();
    for (int i : st.subset) subset.push_back(m.components[i].name);
    sj["subset"] = std::move(subset);
    sj["m"] = st.m;
    sj["class_E"] = class_to_json(st.class_E);
    sj["class_E_cover"] = class_to_json(st.class_E_cover);
    strata.push_back(std::move(sj));
  }
  doc["strata"] = std::move(strata);
  if (m.total_class.has_value()) doc["total_class"] = class_to_json(*m.total_class);
  return doc;
}

inline nearby::SncModel model_from_json(const json& doc) {
  require(doc.is_object(), Errc::ParseError, "model document must be an object");
  nearby::SncModel m;
  std::map<std::string, int> index;
  for (const auto& cj : doc.at("components")) {
    nearby::SncComponent c;
    c.name = cj.at("name").get<std::string>();
    c.multiplicity = cj.at("N").get<long>();
    index[c.name] = static_cast<int>(m.components.size());
    m.components.push_back(std::move(c));
  }
  if (doc.contains("symbols")) {
    for (const auto& sj : doc.at("symbols")) {
      long mu = sj.contains("mu") ? sj.at("mu").get<long>() : 0;
      std::string note = sj.contains("note") ? sj.at("note").get<std::string>() : "";
      m.symbols.declare(sj.at("name").get<std::string>(), mu, note);
    }
  }
  for (const auto& sj : doc.at("strata")) {
    nearby::Stratum st;
    for (const auto& name : sj.at("subset")) {
      auto it = index.find(name.get<std::string>());
      require(it != index.end(), Errc::ParseError,
              "stratum references unknown component '" + name.get<std::string>() + "'");
      st.subset.push_back(it->second);
    }
    std::sort(st.subset.begin(), st.subset.end());
    st.m = sj.at("m").get<long>();
    st.class_E = class_from_json(sj.at("class_E"));
    st.class_E_cover = class_from_json(sj.at("class_E_cover"));
    m.strata.push_back(std::move(st));
  }
  if (doc.contains("total_class")) m.total_class = class_from_json(doc.at("total_class"));
  return m;
}

// ---------------------------------------------------------------------------
// files
// ---------------------------------------------------------------------------

// canonical text form: two-space indent, trailing newline
inline std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::ParseError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

inline void write_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  require(out.good(), Errc::ParseError, "cannot write '" + path + "'");
  out << dump(doc);
}

// the .json files of a directory, sorted by path for deterministic order
inline std::vector<std::string> list_json_files(const std::string& dir) {
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  }
  require(!ec, Errc::ParseError, "cannot list directory '" + dir + "'");
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace motivic::io
