from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import getSampleStyleSheet, ParagraphStyle
from reportlab.lib.units import cm
from reportlab.platypus import SimpleDocTemplate, Table, TableStyle, Paragraph, Spacer
from reportlab.lib.enums import TA_CENTER, TA_RIGHT
from io import BytesIO

from run_manifest import ARTIFACT_VERSION

# Explicit on all sides: SimpleDocTemplate leaves unstated margins at ~1in by default.
_PDF_PAGE_MARGINS = dict(
    leftMargin=1.2 * cm,
    rightMargin=1.2 * cm,
    topMargin=0.45 * cm,
    bottomMargin=0.8 * cm,
)

_HEADER_BLUE = colors.Color(0.17, 0.32, 0.51)
_SECURE_GREEN = colors.Color(0.1, 0.5, 0.2)
_INSECURE_RED = colors.Color(0.8, 0.1, 0.1)


def _styles():
    styles = getSampleStyleSheet()
    return {
        'normal': styles['Normal'],
        'title': ParagraphStyle(
            'CustomTitle',
            parent=styles['Heading1'],
            fontSize=18,
            alignment=TA_CENTER,
            spaceAfter=6,
            spaceBefore=0,
        ),
        'subtitle': ParagraphStyle(
            'CustomSubtitle',
            parent=styles['Normal'],
            fontSize=12,
            alignment=TA_CENTER,
            spaceAfter=4,
            spaceBefore=0,
            textColor=colors.grey
        ),
        'section': ParagraphStyle(
            'Section',
            parent=styles['Heading2'],
            fontSize=14,
            spaceBefore=15,
            spaceAfter=8,
            textColor=_HEADER_BLUE
        ),
        'footer': ParagraphStyle(
            'Footer',
            parent=styles['Normal'],
            fontSize=9,
            textColor=colors.grey,
            alignment=TA_CENTER
        ),
    }


def _verdict_style(base, secure):
    return ParagraphStyle(
        'Verdict',
        parent=base,
        fontSize=16,
        alignment=TA_RIGHT,
        spaceBefore=12,
        spaceAfter=12,
        textColor=_SECURE_GREEN if secure else _INSECURE_RED
    )


def _table(data, col_widths):
    table = Table(data, colWidths=col_widths)
    table.setStyle(TableStyle([
        ('BACKGROUND', (0, 0), (-1, 0), _HEADER_BLUE),
        ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
        ('ALIGN', (0, 0), (-1, -1), 'LEFT'),
        ('ALIGN', (1, 0), (-1, -1), 'RIGHT'),
        ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
        ('FONTSIZE', (0, 0), (-1, 0), 11),
        ('BOTTOMPADDING', (0, 0), (-1, 0), 12),
        ('BACKGROUND', (0, 1), (-1, -1), colors.white),
        ('GRID', (0, 0), (-1, -1), 1, colors.Color(0.9, 0.9, 0.9)),
        ('FONTSIZE', (0, 1), (-1, -1), 10),
        ('TOPPADDING', (0, 1), (-1, -1), 8),
        ('BOTTOMPADDING', (0, 1), (-1, -1), 8),
        ('ROWBACKGROUNDS', (0, 1), (-1, -1), [colors.white, colors.Color(0.97, 0.97, 0.97)]),
    ]))
    return table


def _fmt(value, digits=6):
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return f"{value:.{digits}f}"


def _fmt_estimate(est):
    if est is None or not est.available:
        return "n/a", "n/a", str(0 if est is None else est.count)
    return f"{est.value:.6f}", f"{est.std_error:.6f}", f"{est.count:,}"


def _new_document(buffer):
    # invariant=1 drops timestamps and random ids so identical inputs give identical bytes
    return SimpleDocTemplate(buffer, pagesize=A4, invariant=1, **_PDF_PAGE_MARGINS)


def _footer(elements, styles):
    elements.append(Spacer(1, 40))
    elements.append(Paragraph(f"Generated by wigner-qkd-workbench {ARTIFACT_VERSION}", styles['footer']))


def generate_security_report(report, source_label):
    """Generate a PDF of the closed-form security report for one source"""
    buffer = BytesIO()
    doc = _new_document(buffer)
    styles = _styles()

    elements = []
    elements.append(Paragraph("Wigner-Test Security Report", styles['title']))
    elements.append(Paragraph(f"Source: <b>{source_label}</b>", styles['subtitle']))
    elements.append(Paragraph(f"Protocol: {report.protocol}", styles['subtitle']))
    elements.append(Spacer(1, 10))

    data = [['Quantity', 'Value']]
    data.append(['W (Wigner parameter)', _fmt(report.w)])
    data.append(['W~ (modified parameter)', _fmt(report.w_tilde)])
    if report.w_tilde_prime is not None:
        data.append(["W~' (mirrored parameter)", _fmt(report.w_tilde_prime)])
    data.append(['QBER at (A2, B2)', _fmt(report.qber)])
    data.append(['Critical QBER (-W)', _fmt(report.critical_qber)])
    data.append(['Margin', _fmt(report.margin)])
    elements.append(_table(data, [9 * cm, 6 * cm]))

    elements.append(Paragraph("Verdicts", styles['section']))
    verdicts = [['Test', 'Result']]
    verdicts.append(['Naive Wigner inequality violated (W < 0)', _fmt(report.naive_wigner_violated)])
    verdicts.append(['Modified inequality violated (W~ < 0)', _fmt(report.modified_wigner_violated)])
    if report.modified_prime_violated is not None:
        verdicts.append(["Mirrored inequality violated (W~' < 0)", _fmt(report.modified_prime_violated)])
    verdicts.append(['Original protocol secure (W < -QBER)', _fmt(report.original_protocol_secure)])
    verdicts.append(['QBER test rejects a certified channel', _fmt(report.eq5_stricter_than_modified)])
    elements.append(_table(verdicts, [11 * cm, 4 * cm]))

    label = "CHANNEL SECURE" if report.secure else "CHANNEL NOT CERTIFIED"
    elements.append(Paragraph(f"<b>{label}</b>", _verdict_style(styles['normal'], report.secure)))

    _footer(elements, styles)
    doc.build(elements)
    buffer.seek(0)
    return buffer


def generate_session_report(result, config, source_label):
    """Generate a PDF summarizing a simulated session: estimators, key accounting, verdicts"""
    buffer = BytesIO()
    doc = _new_document(buffer)
    styles = _styles()

    elements = []
    elements.append(Paragraph("Simulated QKD Session", styles['title']))
    elements.append(Paragraph(f"Source: <b>{source_label}</b>", styles['subtitle']))
    elements.append(Paragraph(
        f"{config.variant.value} &middot; {config.n_pairs:,} pairs &middot; seed {config.seed} "
        f"&middot; sacrifice {config.sacrifice_fraction:g}",
        styles['subtitle']
    ))
    elements.append(Spacer(1, 10))

    estimates = [['Estimator', 'Value', 'Std. error', 'Rounds']]
    estimates.append(['W', *_fmt_estimate(result.est_w)])
    estimates.append(['W~', *_fmt_estimate(result.est_w_tilde)])
    if result.est_w_tilde_prime is not None:
        estimates.append(["W~'", *_fmt_estimate(result.est_w_tilde_prime)])
    estimates.append(['QBER', *_fmt_estimate(result.est_qber)])
    elements.append(_table(estimates, [4 * cm, 4 * cm, 4 * cm, 4 * cm]))

    elements.append(Paragraph("Key accounting", styles['section']))
    accounting = [['Quantity', 'Value']]
    accounting.append(['Key length (bits)', f"{result.key_length:,}"])
    accounting.append(['Key bit errors', f"{result.key_errors:,}"])
    accounting.append(['Key fraction', _fmt(result.key_fraction)])
    accounting.append(['Sacrificed (A2, B2) rounds', f"{result.sacrificed_rounds:,}"])
    accounting.append(['Test rounds', f"{result.test_rounds:,}"])
    accounting.append(['Utilization', _fmt(result.utilization)])
    elements.append(_table(accounting, [9 * cm, 6 * cm]))

    elements.append(Paragraph("Verdicts", styles['section']))
    verdicts = [['Test', 'Result']]
    for name, value in result.verdicts.items():
        verdicts.append([name.replace('_', ' '), _fmt(value)])
    elements.append(_table(verdicts, [11 * cm, 4 * cm]))

    modified = result.verdicts.get('modified_wigner_violated')
    prime = result.verdicts.get('modified_prime_violated')
    if modified is None:
        label, secure = "VERDICT WITHHELD (no sacrificed rounds)", False
    else:
        secure = bool(modified) and (prime is None or bool(prime))
        label = "CHANNEL SECURE" if secure else "CHANNEL NOT CERTIFIED"
    elements.append(Paragraph(f"<b>{label}</b>", _verdict_style(styles['normal'], secure)))

    _footer(elements, styles)
    doc.build(elements)
    buffer.seek(0)
    return buffer
