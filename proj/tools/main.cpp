// Command-line front end: one command per process, structured JSON reports
// on stdout, verdict-carrying exit codes:
//   0  pass / unobstructed / model realized
//   1  invalid input
//   2  obstructed
//   3  indeterminate (missing certificates or coverage gaps)

#include <repsys/document.hpp>
#include <repsys/models.hpp>
#include <repsys/presets.hpp>
#include <repsys/renormalization.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;
using namespace repsys;

constexpr int kExitPass = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitObstructed = 2;
constexpr int kExitIndeterminate = 3;

struct Options {
    std::string file;
    double tol = 1e-9;
    int depth = 0;
    std::string out;
    std::string format = "json";
    std::vector<std::string> curves;
};

void emit(const Json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write '" + out_path + "'");
    out << report.dump(2) << "\n";
}

Json json_matrix(const TransitionMatrix& tm) {
    Json j;
    j["index"] = tm.index;
    j["n"] = tm.matrix.size();
    Json entries = Json::array();
    for (std::size_t i = 0; i < tm.matrix.size(); ++i)
        for (std::size_t k = 0; k < tm.matrix.size(); ++k)
            entries.push_back(to_string(tm.matrix(i, k)));
    j["entries"] = entries;
    return j;
}

Json json_enclosure(const Enclosure& e) {
    Json j;
    j["lo"] = to_string(e.lo);
    j["hi"] = to_string(e.hi);
    j["lo_float"] = e.lo_d();
    j["hi_float"] = e.hi_d();
    return j;
}

Json json_witness(const std::vector<std::string>& index, const std::vector<Rational>& v) {
    Json j = Json::object();
    for (std::size_t i = 0; i < index.size(); ++i) j[index[i]] = to_string(v[i]);
    return j;
}

Json json_certificate(const NotSubunitCertificate& c) {
    Json j;
    j["lambda_lower_bound"] = to_string(c.lambda_lower_bound);
    j["lambda_lower_bound_float"] = to_double(c.lambda_lower_bound);
    j["eigenvector"] = c.eigenvector;
    return j;
}

Document load_or_exit(const std::string& path) {
    const ParseResult parsed = load_document(path);
    if (!parsed.ok()) {
        Json report;
        report["command"] = "parse";
        report["file"] = path;
        report["valid"] = false;
        Json diags = Json::array();
        for (const auto& d : parsed.diagnostics) diags.push_back({{"code", d.code}, {"message", d.message}});
        report["diagnostics"] = diags;
        std::cout << report.dump(2) << "\n";
        std::exit(kExitInvalid);
    }
    return *parsed.document;
}

Rational tol_rational(double tol) {
    if (tol <= 0) throw Error("--tol must be positive");
    return rational_from_double(tol);
}

int cmd_validate(const Options& opt) {
    const ParseResult parsed = load_document(opt.file);
    Json report;
    report["command"] = "validate";
    report["file"] = opt.file;
    report["valid"] = parsed.ok();
    Json diags = Json::array();
    for (const auto& d : parsed.diagnostics) diags.push_back({{"code", d.code}, {"message", d.message}});
    report["diagnostics"] = diags;
    emit(report, opt.out);
    return parsed.ok() ? kExitPass : kExitInvalid;
}

int cmd_classify(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    Json report;
    report["command"] = "classify";
    Json pieces = Json::array();
    for (const auto& piece : doc.presentation.pieces) {
        Json pj;
        pj["id"] = piece.id;
        pj["type"] = std::string(1, piece_type_letter(classify_piece(piece)));
        pieces.push_back(pj);
    }
    report["pieces"] = pieces;

    const auto y = boundary_multicurve(doc.presentation);
    Json yj = Json::array();
    for (const auto& entry : y.entries)
        yj.push_back({{"representative", entry.representative}, {"piece", entry.piece}});
    report["boundary_multicurve"] = yj;
    if (!y.annulus_labels.empty()) {
        Json labels = Json::object();
        for (const auto& [piece, pm] : y.annulus_labels)
            labels[piece] = {{"plus", pm.first}, {"minus", pm.second}};
        report["annulus_labels"] = labels;
    }

    Json universe = Json::array();
    for (const auto& u : doc.universe) {
        const Piece& piece = piece_of(doc.presentation, u.cls.piece());
        const auto kind = classify_curve(piece, u.cls.side());
        const char* names[] = {"null-homotopic", "peripheral", "boundary-parallel", "essential"};
        Json uj;
        uj["id"] = u.id;
        uj["piece"] = u.cls.piece();
        uj["kind"] = names[static_cast<int>(kind.kind)];
        universe.push_back(uj);
    }
    report["universe"] = universe;
    emit(report, opt.out);
    return kExitPass;
}

int cmd_boundary_check(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    // an absent table is fine while Y is empty; any needed row comes back as
    // a coverage gap
    const PullbackTable table = doc.pullbacks ? *doc.pullbacks : PullbackTable({}, {});
    const auto verdict = boundary_obstruction_check(doc.presentation, doc.universe, table);
    Json report;
    report["command"] = "boundary-check";
    report["scope"] = "exact";
    report["y_empty"] = verdict.y_empty;
    report["obstructed"] = verdict.obstructed;
    if (!verdict.y_empty) {
        report["boundary_matrix"] = json_matrix(verdict.boundary_matrix);
        if (verdict.witness)
            report["witness"] = json_witness(verdict.boundary_matrix.index, verdict.witness->v);
        if (verdict.certificate) report["certificate"] = json_certificate(*verdict.certificate);
    }
    emit(report, opt.out);
    return verdict.obstructed ? kExitObstructed : kExitPass;
}

int cmd_stabilize(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    if (!doc.pullbacks) throw CoverageGap("document has no pullbacks table");
    std::vector<std::string> start = opt.curves;
    if (start.empty()) {
        // default: the boundary multicurve
        for (const auto& entry : boundary_multicurve(doc.presentation).entries) {
            const auto id = universe_lookup(doc.universe, entry.cls);
            if (!id)
                throw CoverageGap("boundary class of '" + entry.representative +
                                  "' is not in the curve universe");
            start.push_back(*id);
        }
    }
    const auto result = stabilize(start, *doc.pullbacks);
    Json report;
    report["command"] = "stabilize";
    report["start"] = start;
    report["stable"] = result.stable;
    report["steps"] = result.steps;
    emit(report, opt.out);
    return kExitPass;
}

int cmd_obstruction(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    if (!doc.pullbacks) throw CoverageGap("document has no pullbacks table");
    const auto verdict = obstruction_verdict(*doc.pullbacks, tol_rational(opt.tol));
    Json report;
    report["command"] = "obstruction";
    report["scope"] = verdict.scope;
    report["obstructed"] = verdict.obstructed;
    if (verdict.obstructed) {
        report["irreducible_curves"] = verdict.irreducible_curves;
        report["irreducible_matrix"] = json_matrix(verdict.irreducible_matrix);
        report["certificate"] = json_certificate(verdict.certificate);
        report["stabilized"] = verdict.stabilized;
    } else {
        report["lambda"] = json_enclosure(verdict.lambda);
        report["witness"] = json_witness(doc.pullbacks->universe(), verdict.witness.v);
    }
    emit(report, opt.out);
    return verdict.obstructed ? kExitObstructed : kExitPass;
}

int cmd_renormalize(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    if (!doc.pullbacks) throw CoverageGap("document has no pullbacks table");
    Json report;
    report["command"] = "renormalize";
    const auto cc = check_constant_complexity(doc.presentation);
    report["constant_complexity"] = cc.ok;
    if (!cc.ok) {
        report["failures"] = cc.failures;
        emit(report, opt.out);
        return kExitIndeterminate;
    }
    Json parallel = Json::object();
    for (const auto& [piece, epiece] : cc.parallel) parallel[piece] = epiece;
    report["parallel"] = parallel;

    const auto sm = star_map(doc.presentation);
    Json next = Json::object();
    for (const auto& [from, to] : sm.next) next[from] = to;
    report["star_map"] = next;

    bool any_obstructed = false;
    Json cycles = Json::array();
    for (const auto& cycle : sm.cycles) {
        const auto d = extract_renormalization(doc.presentation, cycle, doc.universe,
                                               *doc.pullbacks);
        const auto verdict = renormalized_obstruction_check(d, tol_rational(opt.tol));
        Json cj;
        cj["cycle"] = cycle;
        cj["period"] = d.period;
        cj["parallel_epieces"] = d.parallel_epieces;
        cj["cycle_boundary_matrix"] = json_matrix(d.cycle_boundary_matrix);
        cj["composed_universe"] = d.composed_table.universe();
        cj["scope"] = verdict.scope;
        cj["obstructed"] = verdict.obstructed;
        if (verdict.obstructed) {
            cj["irreducible_curves"] = verdict.irreducible_curves;
            cj["certificate"] = json_certificate(verdict.certificate);
        } else {
            cj["lambda"] = json_enclosure(verdict.lambda);
        }
        any_obstructed = any_obstructed || verdict.obstructed;
        cycles.push_back(cj);
    }
    report["cycles"] = cycles;
    emit(report, opt.out);
    return any_obstructed ? kExitObstructed : kExitPass;
}

int cmd_potentials(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    if (!doc.pullbacks) throw CoverageGap("document has no pullbacks table");
    const Rational c = doc.constant("C", Rational(0));

    Json report;
    report["command"] = "potentials";
    report["C"] = to_string(c);

    const auto boundary =
        boundary_obstruction_check(doc.presentation, doc.universe, *doc.pullbacks);
    if (boundary.y_empty) {
        report["y_empty"] = true;
        emit(report, opt.out);
        return kExitPass;
    }
    const auto budget_or = gluing_budget(boundary.boundary_matrix, c);
    if (std::holds_alternative<NotSubunitCertificate>(budget_or)) {
        report["obstructed"] = true;
        report["certificate"] = json_certificate(std::get<NotSubunitCertificate>(budget_or));
        emit(report, opt.out);
        return kExitObstructed;
    }
    const auto& budget = std::get<GluingBudget>(budget_or);
    report["obstructed"] = false;
    Json bj;
    bj["M"] = to_string(budget.M);
    Json vj = Json::object(), uj = Json::object();
    for (const auto& [curve, value] : budget.v) vj[curve] = to_string(value);
    for (const auto& [curve, value] : budget.u) uj[curve] = to_string(value);
    bj["v"] = vj;
    bj["u"] = uj;
    report["budget"] = bj;

    const auto cc = check_constant_complexity(doc.presentation);
    if (cc.ok) {
        // moduli prescribed to the annular pieces: u at the plus label
        const auto y = boundary_multicurve(doc.presentation);
        if (!y.annulus_labels.empty()) {
            Json annuli = Json::object();
            for (const auto& [piece, labels] : y.annulus_labels)
                annuli[piece] = to_string(budget.u.at(labels.first));
            report["annulus_moduli"] = annuli;
        }
        // per-piece equipotential data, pre-periodic pieces included
        Json pieces = Json::object();
        for (const auto& piece : doc.presentation.pieces) {
            if (classify_piece(piece) != PieceType::C) continue;
            Json rows = Json::array();
            for (const auto& entry : piece_potentials(doc.presentation, piece, budget.u)) {
                Json ej;
                ej["gamma"] = entry.gamma;
                ej["beta"] = entry.beta;
                ej["degree"] = entry.degree;
                ej["image"] = entry.image;
                ej["kappa_phi"] = to_string(entry.kappa_phi);
                ej["kappa_psi"] = to_string(entry.kappa_psi);
                ej["rho"] = to_string(entry.rho);
                rows.push_back(ej);
            }
            pieces[piece.id] = rows;
        }
        report["pieces"] = pieces;

        Json ledgers = Json::array();
        for (const auto& cycle : star_map(doc.presentation).cycles) {
            const auto d = extract_renormalization(doc.presentation, cycle, doc.universe,
                                                   *doc.pullbacks);
            const auto ledger = prescribe_potentials(d, boundary.boundary_matrix, budget.v, c);
            Json lj;
            lj["cycle"] = cycle;
            lj["M"] = to_string(ledger.M);
            Json map;
            for (const auto& [k, v] : ledger.u) map[k] = to_string(v);
            lj["u"] = map;
            map = Json::object();
            for (const auto& [k, v] : ledger.rho) map[k] = to_string(v);
            lj["rho"] = map;
            map = Json::object();
            for (const auto& [k, v] : ledger.sigma) map[k] = to_string(v);
            lj["sigma"] = map;
            map = Json::object();
            for (const auto& [k, v] : ledger.kappa_phi) map[k] = to_string(v);
            lj["kappa_phi"] = map;
            map = Json::object();
            for (const auto& [k, v] : ledger.kappa_psi) map[k] = to_string(v);
            lj["kappa_psi"] = map;
            ledgers.push_back(lj);
        }
        report["ledgers"] = ledgers;
    }
    emit(report, opt.out);
    return kExitPass;
}

void emit_plot_csv(const std::vector<NonEscapingComponent>& comps, bool as_radii,
                   const std::string& out_path) {
    std::ostringstream csv;
    csv << (as_radii ? "object,depth,inner,outer\n" : "object,depth,left,right\n");
    csv.precision(17);
    for (const auto& c : comps) {
        if (as_radii)
            csv << c.object << "," << c.depth << "," << std::exp(-to_double(c.b)) << ","
                << std::exp(-to_double(c.a)) << "\n";
        else
            csv << c.object << "," << c.depth << "," << to_double(c.a) << "," << to_double(c.b)
                << "\n";
    }
    if (out_path.empty()) {
        std::cout << csv.str();
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write '" + out_path + "'");
    out << csv.str();
}

int cmd_realize_affine(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    if (!doc.affine_spec) throw Error("document has no affine_spec");
    const auto r = realize_affine(*doc.affine_spec);
    if (std::holds_alternative<NotSubunitCertificate>(r)) {
        Json report;
        report["command"] = "realize-affine";
        report["obstructed"] = true;
        report["certificate"] = json_certificate(std::get<NotSubunitCertificate>(r));
        emit(report, "");
        return kExitObstructed;
    }
    const auto& m = std::get<AffineModel>(r);
    if (opt.format == "csv") {
        emit_plot_csv(nonescaping_depth(m, opt.depth), false, opt.out);
        return kExitPass;
    }
    Json report;
    report["command"] = "realize-affine";
    report["obstructed"] = false;
    Json model;
    model["kind"] = "affine";
    Json lengths = Json::array(), lefts = Json::array(), subs = Json::array();
    for (const auto& v : m.lengths) lengths.push_back(to_string(v));
    for (const auto& v : m.lefts) lefts.push_back(to_string(v));
    for (const auto& sub : m.subintervals) {
        Json sj;
        sj["source"] = sub.source;
        sj["target"] = sub.target;
        sj["slope"] = sub.slope;
        sj["increasing"] = sub.increasing;
        sj["left"] = to_string(sub.left);
        sj["length"] = to_string(sub.length);
        sj["map"] = {{"slope", to_string(sub.map.slope)}, {"offset", to_string(sub.map.offset)}};
        subs.push_back(sj);
    }
    model["lengths"] = lengths;
    model["lefts"] = lefts;
    model["subintervals"] = subs;
    report["model"] = model;
    // round trip: the realized maps reproduce the spec matrix exactly
    report["transition_matrix"] =
        json_matrix(TransitionMatrix{{}, extract_transition(m)});
    emit(report, opt.out);
    return kExitPass;
}

int cmd_realize_annuli(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    if (!doc.annuli_spec) throw Error("document has no annuli_spec");
    const auto r = realize_annuli(*doc.annuli_spec);
    if (std::holds_alternative<NotSubunitCertificate>(r)) {
        Json report;
        report["command"] = "realize-annuli";
        report["obstructed"] = true;
        report["certificate"] = json_certificate(std::get<NotSubunitCertificate>(r));
        emit(report, "");
        return kExitObstructed;
    }
    const auto& m = std::get<AnnuliModel>(r);
    if (opt.format == "csv") {
        emit_plot_csv(nonescaping_depth(m, opt.depth), true, opt.out);
        return kExitPass;
    }
    Json report;
    report["command"] = "realize-annuli";
    report["obstructed"] = false;
    Json model;
    model["kind"] = "annuli";
    Json moduli = Json::array(), subs = Json::array();
    for (const auto& v : m.moduli) moduli.push_back(to_string(v));
    for (const auto& sub : m.subannuli) {
        Json sj;
        sj["source"] = sub.source;
        sj["target"] = sub.target;
        sj["degree"] = sub.degree;
        sj["preserves_labels"] = sub.preserves_labels;
        sj["depth"] = to_string(sub.depth);
        sj["modulus"] = to_string(sub.modulus);
        sj["log_scale"] = to_string(sub.log_scale);
        subs.push_back(sj);
    }
    model["moduli"] = moduli;
    model["subannuli"] = subs;
    report["model"] = model;
    report["transition_matrix"] =
        json_matrix(TransitionMatrix{{}, extract_transition(m)});
    emit(report, opt.out);
    return kExitPass;
}

int cmd_combine(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    const PullbackTable table = doc.pullbacks ? *doc.pullbacks : PullbackTable({}, {});
    const auto verdict =
        analytization_verdict(doc.presentation, doc.universe, table, doc.certificates);
    Json report;
    report["command"] = "combine";
    const char* names[] = {"pass", "fail", "indeterminate"};
    report["status"] = names[static_cast<int>(verdict.status)];
    if (!verdict.detail.empty()) report["detail"] = verdict.detail;
    if (verdict.boundary) {
        report["boundary"] = {{"y_empty", verdict.boundary->y_empty},
                              {"obstructed", verdict.boundary->obstructed}};
    }
    Json cycles = Json::array();
    for (const auto& c : verdict.cycles)
        cycles.push_back(
            {{"cycle", c.cycle}, {"branch", c.branch}, {"ok", c.ok}, {"detail", c.detail}});
    report["cycles"] = cycles;
    report["flags"] = {{"pcf_asserted", doc.presentation.flags.pcf_asserted},
                       {"orbifold_not_2222", doc.presentation.flags.orbifold_not_2222}};
    emit(report, opt.out);
    switch (verdict.status) {
        case AnalytizationStatus::Pass: return kExitPass;
        case AnalytizationStatus::Fail: return kExitObstructed;
        case AnalytizationStatus::Indeterminate: return kExitIndeterminate;
    }
    return kExitInvalid;
}

int cmd_spectral(const Options& opt) {
    const Document doc = load_or_exit(opt.file);
    if (!doc.matrix) throw Error("document has no matrix");
    const auto verdict = subunit_certificate(*doc.matrix);
    const auto enclosure = spectral_radius(*doc.matrix, tol_rational(opt.tol));
    Json report;
    report["command"] = "spectral";
    report["n"] = doc.matrix->size();
    report["subunit"] = verdict.is_subunit();
    report["lambda"] = json_enclosure(enclosure);
    if (verdict.is_subunit()) {
        std::vector<std::string> index;
        for (std::size_t i = 0; i < doc.matrix->size(); ++i) index.push_back(std::to_string(i));
        report["witness"] = json_witness(index, verdict.witness().v);
    } else {
        report["certificate"] = json_certificate(verdict.certificate());
    }
    emit(report, opt.out);
    return verdict.is_subunit() ? kExitPass : kExitObstructed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Combinatorial repelling systems: obstruction checks and explicit models"};
    app.require_subcommand(1);

    Options opt;
    const auto add_common = [&](CLI::App* cmd, bool needs_file = true) {
        if (needs_file) cmd->add_option("file", opt.file, "experiment document")->required();
        cmd->add_option("--tol", opt.tol, "width of numeric lambda enclosures")
            ->default_val(1e-9);
        cmd->add_option("--depth", opt.depth, "preimage depth for plot data")->default_val(0);
        cmd->add_option("--out", opt.out, "write the report/data to a file");
        cmd->add_option("--format", opt.format, "json|csv")->default_val("json");
        return cmd;
    };

    const auto validate = add_common(app.add_subcommand("validate", "schema and integrity check"));
    const auto classify =
        add_common(app.add_subcommand("classify", "piece types and boundary multicurve"));
    const auto boundary =
        add_common(app.add_subcommand("boundary-check", "boundary obstruction verdict"));
    const auto stab = add_common(app.add_subcommand("stabilize", "pullback-saturate a multicurve"));
    stab->add_option("--curves", opt.curves, "starting curves (default: boundary multicurve)")
        ->delimiter(',');
    const auto obstruction =
        add_common(app.add_subcommand("obstruction", "obstruction verdict over the universe"));
    const auto renorm =
        add_common(app.add_subcommand("renormalize", "cycles, descriptors and composed checks"));
    const auto potentials =
        add_common(app.add_subcommand("potentials", "gluing budget and potential ledger"));
    const auto raffine =
        add_common(app.add_subcommand("realize-affine", "build the affine interval model"));
    const auto rannuli =
        add_common(app.add_subcommand("realize-annuli", "build the round annuli model"));
    const auto combine =
        add_common(app.add_subcommand("combine", "full analytization pipeline verdict"));
    const auto spectral =
        add_common(app.add_subcommand("spectral", "subunit certificate and lambda enclosure"));

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(opt);
        if (classify->parsed()) return cmd_classify(opt);
        if (boundary->parsed()) return cmd_boundary_check(opt);
        if (stab->parsed()) return cmd_stabilize(opt);
        if (obstruction->parsed()) return cmd_obstruction(opt);
        if (renorm->parsed()) return cmd_renormalize(opt);
        if (potentials->parsed()) return cmd_potentials(opt);
        if (raffine->parsed()) return cmd_realize_affine(opt);
        if (rannuli->parsed()) return cmd_realize_annuli(opt);
        if (combine->parsed()) return cmd_combine(opt);
        if (spectral->parsed()) return cmd_spectral(opt);
    } catch (const CoverageGap& e) {
        std::cerr << "indeterminate: " << e.what() << "\n";
        return kExitIndeterminate;
    } catch (const NotConstantComplexity& e) {
        std::cerr << "indeterminate: " << e.what() << "\n";
        return kExitIndeterminate;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
