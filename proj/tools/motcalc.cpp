// motcalc: batch calculator for equivariant quotient classes, finite-field
// point counts and nearby-fiber congruences.
//
// Machine output (--format machine) is line-delimited JSON with fixed key
// order and no timestamps, so identical inputs produce identical bytes; the
// human-readable table is derived from the same records.
//
// Exit status: 0 all checks passed, 1 a check failed, 2 parse error,
// 3 budget exceeded.

#include <future>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "motivic/catalog.hpp"
#include "motivic/io.hpp"
#include "motivic/quotient.hpp"

using namespace motivic;
using io::json;

namespace {

struct Output {
  bool machine = false;

  void emit(const json& record, const std::string& table_line) const {
    if (machine)
      std::cout << record.dump() << "\n";
    else
      std::cout << table_line << "\n";
  }
};

int exit_code_for(const CalcError& e) {
  switch (e.code()) {
    case Errc::ParseError:
    case Errc::ModelInvalid:
      return 2;
    case Errc::BudgetExceeded:
      return 3;
    default:
      return 1;
  }
}

json trace_to_json(const quotient::ComputationTrace& trace, const gfq::FieldTower& tw) {
  json steps = json::array();
  for (const auto& st : trace.steps) {
    json sj;
    sj["kind"] = st.kind;
    json params = json::object();
    for (const auto& [k, v] : st.params) params[k] = v;
    sj["params"] = std::move(params);
    if (st.subst.has_value()) {
      json coeffs = json::array();
      for (const auto& c : st.subst->c) coeffs.push_back(c.coords);
      sj["substitution"] = json{{"level_degree", tw.degree(st.subst->level)},
                                {"coeffs", std::move(coeffs)},
                                {"text", tw.lp_to_string(*st.subst)}};
    }
    steps.push_back(std::move(sj));
  }
  return steps;
}

// ---------------------------------------------------------------------------
// per-item verification used by verify-catalog
// ---------------------------------------------------------------------------

struct ItemResult {
  json record;
  std::string table;
  bool pass = true;
};

ItemResult verify_action_item(const catalog::CatalogAction& item,
                              const quotient::OracleOptions& opt) {
  ItemResult res;
  json checks = json::array();
  auto check = [&](const std::string& name, const std::string& expected, const std::string& got) {
    bool ok = expected == got;
    checks.push_back(json{{"name", name}, {"expected", expected}, {"got", got}, {"pass", ok}});
    res.pass &= ok;
  };

  const action::Action& a = item.act;
  Integer q = a.tower.level_size(a.tower.k_index());
  try {
    auto qc = quotient::quotient_class(a);
    std::string want_ring = a.group.is_tame() ? "K0" : "K0_mod";
    check("quotient-ring-tag", want_ring, qc.cls.tag().to_string());
    check("quotient-class",
          mclass::MotivicClass::lefschetz(qc.cls.tag(), a.dim).to_string(),
          qc.cls.to_string());
    for (long m : {1L, 2L}) {
      Integer expect;
      mpz_pow_ui(expect.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(m * a.dim));
      Integer got = quotient::orbit_count_oracle(a, m, opt);
      check("oracle-m" + std::to_string(m), expect.get_str(), got.get_str());
      Integer got2 = quotient::orbit_count_burnside(a, m, opt);
      check("burnside-m" + std::to_string(m), expect.get_str(), got2.get_str());
    }
  } catch (const CalcError& e) {
    checks.push_back(json{{"name", "execution"}, {"expected", "ok"}, {"got", e.what()},
                          {"pass", false}});
    res.pass = false;
  }

  res.record = json{{"record", "catalog-item"},
                    {"kind", "action"},
                    {"name", item.name},
                    {"notes", item.notes},
                    {"checks", checks},
                    {"pass", res.pass}};
  std::string detail;
  for (const auto& c : checks)
    if (!c["pass"].get<bool>())
      detail += " [" + c["name"].get<std::string>() + ": expected " +
                c["expected"].get<std::string>() + ", got " + c["got"].get<std::string>() + "]";
  res.table = std::string(res.pass ? "PASS" : "FAIL") + " action " + item.name + detail;
  return res;
}

ItemResult verify_model_item(const std::string& name, const nearby::SncModel& model,
                             bool expect_congruent) {
  ItemResult res;
  json checks = json::array();
  try {
    auto cong = nearby::congruence_check(model);
    bool ok = cong.holds == expect_congruent;
    checks.push_back(json{{"name", "congruence"},
                          {"expected", expect_congruent ? "holds" : "fails"},
                          {"got", cong.holds ? "holds" : "fails"},
                          {"pass", ok}});
    if (!cong.holds)
      checks.back()["witness"] = cong.witness.to_string();
    res.pass &= ok;
  } catch (const CalcError& e) {
    checks.push_back(json{{"name", "execution"}, {"expected", "ok"}, {"got", e.what()},
                          {"pass", false}});
    res.pass = false;
  }
  res.record = json{{"record", "catalog-item"},
                    {"kind", expect_congruent ? "model" : "mutant"},
                    {"name", name},
                    {"checks", checks},
                    {"pass", res.pass}};
  res.table = std::string(res.pass ? "PASS" : "FAIL") +
              (expect_congruent ? " model " : " mutant ") + name;
  return res;
}

mclass::UVPoly uvpoly_from_json(const json& j) {
  if (j.is_number_integer()) return mclass::UVPoly::constant(Integer(j.get<long long>()));
  if (j.is_string()) return mclass::UVPoly::constant(Integer(j.get<std::string>()));
  require(j.is_array(), Errc::ParseError, "symbol image must be an integer or [[u,v,c],...]");
  mclass::UVPoly f;
  for (const auto& t : j) {
    require(t.is_array() && t.size() == 3, Errc::ParseError, "image terms are [u,v,c]");
    f.add_term(t[0].get<int>(), t[1].get<int>(), io::integer_from_json(t[2]));
  }
  return f;
}

std::string uv_str(const mclass::UVPoly& v) { return v.to_string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic Grothendieck-ring calculator with finite-field verification"};
  app.require_subcommand(1);

  Output out;
  std::string format = "table";
  app.add_option("--format", format, "output format: table or machine")
      ->check(CLI::IsMember({"table", "machine"}));

  // shared options
  std::string input;
  bool emit_trace = false;
  long m_power = 1;
  long budget = quotient::OracleOptions().max_points;
  int max_degree = quotient::OracleOptions().max_degree;
  std::string method = "enumerate";
  long realize_q = 0;
  bool realize_hd = false;
  std::string images_path;
  std::string catalog_dir, models_dir;
  int jobs = 1;

  auto* validate_cmd = app.add_subcommand("validate-action", "check action hypotheses");
  validate_cmd->add_option("input", input, "action file")->required();

  auto* qc_cmd = app.add_subcommand("quotient-class", "compute [V/G] with certificate");
  qc_cmd->add_option("input", input, "action file")->required();
  qc_cmd->add_flag("--emit-trace", emit_trace, "attach the computation trace");

  auto* inv_cmd = app.add_subcommand("invariant-ring", "compute K[x]^G = k'[y] for d = 1");
  inv_cmd->add_option("input", input, "action file")->required();
  inv_cmd->add_flag("--emit-trace", emit_trace, "attach the computation trace");

  auto* pc_cmd = app.add_subcommand("point-count", "count |(V/G)(F_{q^m})|");
  pc_cmd->add_option("input", input, "action file")->required();
  pc_cmd->add_option("--m", m_power, "field power m")->required();
  pc_cmd->add_option("--budget", budget, "enumeration point budget");
  pc_cmd->add_option("--max-degree", max_degree, "evaluation field degree cap");
  pc_cmd->add_option("--method", method, "enumerate, burnside or auto")
      ->check(CLI::IsMember({"enumerate", "burnside", "auto"}));

  auto* nf_cmd = app.add_subcommand("nearby-fiber", "assemble S_f and S_f/mu");
  nf_cmd->add_option("input", input, "model file")->required();

  auto* mr_cmd = app.add_subcommand("motivic-reduction", "R(f) from the declared strata");
  mr_cmd->add_option("input", input, "model file")->required();

  auto* cc_cmd = app.add_subcommand("congruence-check", "S_f/mu = R(f) mod L");
  cc_cmd->add_option("input", input, "model file")->required();

  auto* re_cmd = app.add_subcommand("realize", "realize a model's invariants");
  re_cmd->add_option("input", input, "model file")->required();
  re_cmd->add_option("--q", realize_q, "point-count realization over F_q");
  re_cmd->add_flag("--hd", realize_hd, "Hodge-Deligne realization (L -> uv)");
  re_cmd->add_option("--images", images_path, "symbol image file (JSON object)");

  auto* vc_cmd = app.add_subcommand("verify-catalog", "run the bundled catalog and gallery");
  vc_cmd->add_option("--catalog", catalog_dir, "directory of action files (default: built in)");
  vc_cmd->add_option("--models", models_dir, "directory of model files (default: built in)");
  vc_cmd->add_option("--jobs", jobs, "concurrent workers")->check(CLI::PositiveNumber);
  vc_cmd->add_option("--budget", budget, "enumeration point budget");

  CLI11_PARSE(app, argc, argv);
  out.machine = format == "machine";

  try {
    if (validate_cmd->parsed()) {
      auto a = io::action_from_json(io::read_file(input));
      auto rep = action::validate(a);
      json issues = json::array();
      for (const auto& i : rep.issues)
        issues.push_back(json{{"check", i.check}, {"detail", i.detail}});
      out.emit(json{{"record", "validate"},
                    {"input", input},
                    {"valid", rep.valid()},
                    {"issues", issues}},
               std::string(rep.valid() ? "valid" : "invalid: " + rep.summary()));
      return rep.valid() ? 0 : 1;
    }

    if (qc_cmd->parsed()) {
      auto a = io::action_from_json(io::read_file(input));
      auto res = quotient::quotient_class(a);
      json rec{{"record", "quotient-class"},
               {"input", input},
               {"ring", res.cls.tag().to_string()},
               {"class", res.cls.to_string()},
               {"wild", !a.group.is_tame()}};
      if (emit_trace) rec["trace"] = trace_to_json(res.trace, a.tower);
      out.emit(rec, "[V/G] = " + res.cls.to_string() + " in " + res.cls.tag().to_string() +
                        (emit_trace ? "  (" + std::to_string(res.trace.steps.size()) +
                                          " trace steps)"
                                    : ""));
      if (emit_trace && !out.machine)
        for (const auto& st : res.trace.steps) {
          std::string line = "  step " + st.kind;
          for (const auto& [k, v] : st.params) line += " " + k + "=" + v;
          std::cout << line << "\n";
        }
      return 0;
    }

    if (inv_cmd->parsed()) {
      auto a = io::action_from_json(io::read_file(input));
      auto rep = action::validate(a);
      require(rep.valid(), Errc::HypothesisViolation, rep.summary());
      auto norm = action::normalize_and_center(a);
      auto res = quotient::invariant_ring_d1(norm.action);
      json rec{{"record", "invariant-ring"},
               {"input", input},
               {"base_field_degree", res.tower.degree(res.base_field_level)},
               {"generator", res.tower.lp_to_string(res.generator_poly, "x")},
               {"generator_degree", res.generator_poly.degree()}};
      if (emit_trace) rec["trace"] = trace_to_json(res.trace, res.tower);
      out.emit(rec, "K[x]^G = k'[y], y = " + res.tower.lp_to_string(res.generator_poly, "x") +
                        ", [k':F_p] = " + std::to_string(res.tower.degree(res.base_field_level)));
      if (emit_trace && !out.machine)
        for (const auto& st : res.trace.steps) {
          std::string line = "  step " + st.kind;
          for (const auto& [k, v] : st.params) line += " " + k + "=" + v;
          std::cout << line << "\n";
        }
      return 0;
    }

    if (pc_cmd->parsed()) {
      auto a = io::action_from_json(io::read_file(input));
      quotient::OracleOptions opt;
      opt.max_points = budget;
      opt.max_degree = max_degree;
      Integer count;
      std::string used = method;
      if (method == "enumerate") {
        count = quotient::orbit_count_oracle(a, m_power, opt);
      } else if (method == "burnside") {
        count = quotient::orbit_count_burnside(a, m_power, opt);
      } else {
        try {
          count = quotient::orbit_count_oracle(a, m_power, opt);
          used = "enumerate";
        } catch (const CalcError& e) {
          if (e.code() != Errc::BudgetExceeded) throw;
          count = quotient::orbit_count_burnside(a, m_power, opt);
          used = "burnside";
        }
      }
      out.emit(json{{"record", "point-count"},
                    {"input", input},
                    {"m", m_power},
                    {"method", used},
                    {"count", count.get_str()}},
               "|(V/G)(F_{q^" + std::to_string(m_power) + "})| = " + count.get_str() + "  (" +
                   used + ")");
      return 0;
    }

    if (nf_cmd->parsed()) {
      auto model = io::model_from_json(io::read_file(input));
      auto sf = nearby::nearby_fiber(model);
      auto sfq = nearby::nearby_fiber_quotient(model);
      out.emit(json{{"record", "nearby-fiber"},
                    {"input", input},
                    {"ring", sf.tag().to_string()},
                    {"nearby_fiber", sf.to_string()},
                    {"quotient_ring", sfq.tag().to_string()},
                    {"nearby_fiber_quotient", sfq.to_string()}},
               "S_f = " + sf.to_string() + " in " + sf.tag().to_string() +
                   "\nS_f/mu = " + sfq.to_string() + " in " + sfq.tag().to_string());
      return 0;
    }

    if (mr_cmd->parsed()) {
      auto model = io::model_from_json(io::read_file(input));
      auto rf = nearby::motivic_reduction(model);
      out.emit(json{{"record", "motivic-reduction"},
                    {"input", input},
                    {"ring", rf.tag().to_string()},
                    {"reduction", rf.to_string()}},
               "R(f) = " + rf.to_string() + " in " + rf.tag().to_string());
      return 0;
    }

    if (cc_cmd->parsed()) {
      auto model = io::model_from_json(io::read_file(input));
      auto res = nearby::congruence_check(model);
      out.emit(json{{"record", "congruence-check"},
                    {"input", input},
                    {"holds", res.holds},
                    {"lhs", res.lhs.to_string()},
                    {"rhs", res.rhs.to_string()},
                    {"witness", res.witness.to_string()}},
               res.holds ? "congruence holds: " + res.lhs.to_string() + " = " + res.rhs.to_string()
                         : "congruence FAILS: witness " + res.witness.to_string());
      return res.holds ? 0 : 1;
    }

    if (re_cmd->parsed()) {
      require(realize_hd != (realize_q > 0), Errc::ParseError,
              "choose exactly one of --q and --hd");
      auto model = io::model_from_json(io::read_file(input));
      mclass::RealizationSpec spec = realize_hd
                                         ? mclass::RealizationSpec::hodge_deligne()
                                         : mclass::RealizationSpec::point_count(Integer(realize_q));
      if (realize_q > 0) {
        auto fac = gfq::factor_small(realize_q);
        require(fac.size() == 1, Errc::ParseError,
                "q = " + std::to_string(realize_q) + " is not a prime power");
      }
      if (!images_path.empty()) {
        auto doc = io::read_file(images_path);
        require(doc.is_object(), Errc::ParseError, "image file must be a JSON object");
        for (auto it = doc.begin(); it != doc.end(); ++it)
          spec.with_symbol(it.key(), uvpoly_from_json(it.value()));
      }
      auto rep = nearby::realize_model(model, spec);
      out.emit(json{{"record", "realize-model"},
                    {"input", input},
                    {"target", realize_hd ? "hodge-deligne" : "point-count"},
                    {"L", uv_str(rep.L_image)},
                    {"nearby_quotient", uv_str(rep.nearby_quotient)},
                    {"reduction", uv_str(rep.reduction_pre)},
                    {"nearby_residue", uv_str(rep.nearby_residue)},
                    {"reduction_residue", uv_str(rep.reduction_residue)},
                    {"residues_match", rep.residues_match},
                    {"generic_fiber_equiv_one", rep.generic_fiber_equiv_one},
                    {"reduction_equiv_one", rep.reduction_equiv_one},
                    {"shadow_ok", rep.shadow_ok}},
               "S_f/mu -> " + uv_str(rep.nearby_quotient) + ", R(f) pre-reduction -> " +
                   uv_str(rep.reduction_pre) + ", residues mod L " +
                   (rep.residues_match ? "match" : "DIFFER") +
                   (rep.shadow_ok ? "" : ", shadow check FAILED"));
      return rep.residues_match && rep.shadow_ok ? 0 : 1;
    }

    if (vc_cmd->parsed()) {
      quotient::OracleOptions opt;
      opt.max_points = budget;

      struct Task {
        std::function<ItemResult()> run;
      };
      std::vector<Task> tasks;
      if (catalog_dir.empty()) {
        for (const auto& item : catalog::builtin_actions())
          tasks.push_back({[item, opt] { return verify_action_item(item, opt); }});
      } else {
        std::vector<std::string> files = io::list_json_files(catalog_dir);
        require(!files.empty(), Errc::ParseError, "no .json files in '" + catalog_dir + "'");
        for (const auto& f : files) {
          tasks.push_back({[f, opt] {
            catalog::CatalogAction item;
            item.name = f;
            auto doc = io::read_file(f);
            if (doc.contains("name")) item.name = doc["name"].get<std::string>();
            item.act = io::action_from_json(doc);
            return verify_action_item(item, opt);
          }});
        }
      }
      if (models_dir.empty()) {
        for (const auto& item : catalog::builtin_models())
          tasks.push_back({[item] { return verify_model_item(item.name, item.model, true); }});
        for (const auto& item : catalog::builtin_mutated_models())
          tasks.push_back({[item] { return verify_model_item(item.name, item.model, false); }});
      } else {
        for (const auto& f : io::list_json_files(models_dir)) {
          bool mutant = f.find("/bad/") != std::string::npos;
          tasks.push_back({[f, mutant] {
            auto model = io::model_from_json(io::read_file(f));
            return verify_model_item(f, model, !mutant);
          }});
        }
      }

      std::vector<ItemResult> results(tasks.size());
      if (jobs <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i].run();
      } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
          for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
            results[i] = tasks[i].run();
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
      }

      int failed = 0;
      for (const auto& r : results) {
        out.emit(r.record, r.table);
        if (!r.pass) ++failed;
      }
      out.emit(json{{"record", "catalog-summary"},
                    {"items", results.size()},
                    {"failed", failed}},
               std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) +
                   " items passed");
      return failed == 0 ? 0 : 1;
    }
  } catch (const CalcError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
