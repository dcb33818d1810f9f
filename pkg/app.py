from flask import Flask, request, jsonify, send_file
import logging

import optimizer
from pdf_export import generate_security_report
from protocol.session import run_session
from protocol.sifting import sift
from quantum_model import Protocol
from run_manifest import ARTIFACT_VERSION
from runtime_logging import configure_logging, set_run_context
from security_metrics import security_report
from session_config import parse_source, session_spec_from_dict
from validators import (
    ValidationError, NumericalError, validate_choice, validate_margin,
    validate_resolution, validate_tolerance, validate_count
)

logger = logging.getLogger(__name__)

app = Flask(__name__)

# Simulations run inside the request; keep them bounded
MAX_API_PAIRS = 2_000_000
MAX_API_RESOLUTION = 2048
PROTOCOL_CHOICES = tuple(p.value for p in Protocol)


# ============== ERRORS ==============

@app.errorhandler(ValidationError)
def handle_validation_error(e):
    return jsonify({"error": e.message, "field": e.field}), 400


@app.errorhandler(NumericalError)
def handle_numerical_error(e):
    return jsonify({"error": e.message, "point": e.point}), 422


def _json_body():
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ValidationError("Request body must be a JSON object", "body")
    return data


def _analysis_params(data):
    """Shared by GET (query string) and POST (JSON body) analyze requests."""
    if "attack" in data:
        source_spec = {"attack": data["attack"]}
    elif "intercept_resend" in data:
        source_spec = {"intercept_resend": data["intercept_resend"]}
    else:
        source_spec = data.get("source", "singlet")
    if isinstance(source_spec, dict) and "attack_file" in source_spec:
        raise ValidationError("attack_file sources are not accepted over HTTP", "source")

    protocol = validate_choice(data.get("protocol", "Original4"), PROTOCOL_CHOICES, "protocol")
    margin = validate_margin(data.get("margin", 0.0))
    return parse_source(source_spec), protocol, margin


# ============== HEALTH ==============

@app.route('/api/health')
def health():
    return jsonify({"status": "ok", "version": ARTIFACT_VERSION})


# ============== ANALYSIS ==============

@app.route('/api/analyze', methods=['GET', 'POST'])
def analyze():
    """Closed-form security report for a source"""
    set_run_context("api-analyze")
    data = _json_body() if request.method == 'POST' else request.args.to_dict()
    source, protocol, margin = _analysis_params(data)
    report = security_report(source, protocol, margin)
    return jsonify({"source": source.label, **report.to_dict()})


@app.route('/api/report.pdf')
def report_pdf():
    set_run_context("api-report")
    source, protocol, margin = _analysis_params(request.args.to_dict())
    report = security_report(source, protocol, margin)
    pdf_buffer = generate_security_report(report, source.label)

    filename = f"security_report_{source.label}_{report.protocol}.pdf".replace(" ", "_")
    return send_file(pdf_buffer, as_attachment=True, download_name=filename, mimetype='application/pdf')


# ============== OPTIMIZATION ==============

@app.route('/api/optimize/<objective>')
def optimize(objective):
    set_run_context("api-optimize")
    objective = validate_choice(objective, tuple(optimizer.OBJECTIVES), "objective")
    resolution = validate_resolution(request.args.get('resolution', 180))
    resolution = validate_count(resolution, "resolution", minimum=2, maximum=MAX_API_RESOLUTION)
    tolerance = validate_tolerance(request.args.get('tolerance', optimizer.DEFAULT_TOLERANCE))

    result = optimizer.FINDERS[objective](resolution, tolerance)
    return jsonify({"objective": objective, **result.to_dict()})


# ============== SIMULATION ==============

@app.route('/api/simulate', methods=['POST'])
def simulate():
    data = _json_body()
    source_spec = data.get("source")
    if isinstance(source_spec, dict) and "attack_file" in source_spec:
        raise ValidationError("attack_file sources are not accepted over HTTP", "source")

    spec = session_spec_from_dict(data)
    if spec.config.n_pairs > MAX_API_PAIRS:
        raise ValidationError(f"n_pairs must be at most {MAX_API_PAIRS:,} over HTTP", "n_pairs")

    set_run_context("api-simulate", spec.config.seed)
    records = run_session(spec.config, spec.source)
    result, _ = sift(records, spec.config)
    return jsonify(result.to_dict(include_keys=bool(data.get("include_keys", False))))


if __name__ == '__main__':
    import sys
    configure_logging(1)
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 5001
    app.run(debug=True, port=port)
