#!/usr/bin/env python3
"""Writes the synthetic vaccine corpus, mock transcript and config used by the
end-to-end tests. Output is deterministic; rerun after editing this file and
refreeze the goldens."""

import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
CLAIM = "Vaccine A is better than Vaccine B"

TREE = {
    "efficacy": {
        "description": "How well each vaccine prevents infection and disease.",
        "keywords": ["neutralization", "immune stimulation", "post-dose antibody response",
                     "waning immunity", "breakthrough infection", "hospitalization", "lymphocyte",
                     "titer", "transmission", "mortality"],
        "children": {
            "immune response": {
                "neutralizing antibodies": ["neutralization", "antibody", "titer", "serum", "neutralizing",
                                            "assay", "plasma", "seroconversion", "immunoglobulin", "geometric"],
                "T-cell response": ["lymphocyte", "cytokine", "interferon", "helper", "cellular",
                                    "memory", "spot", "clone", "cytotoxic", "activation"],
            },
            "real-world protection": {
                "protection against infection": ["infection", "breakthrough", "incidence", "household",
                                                 "transmission", "exposure", "positivity", "swab",
                                                 "community", "attack"],
                "protection against severe disease": ["hospitalization", "intensive", "ventilation",
                                                      "mortality", "severe", "admission", "oxygen",
                                                      "pneumonia", "ward", "death"],
            },
        },
    },
    "safety": {
        "description": "Adverse events and tolerability of each vaccine across populations.",
        "keywords": None,
        "children": {
            "safety for children": {
                "fever in children": ["fever", "pediatric", "temperature", "toddler", "febrile",
                                      "paracetamol", "irritability", "infant", "nursery", "crying"],
                "myocarditis in adolescents": ["myocarditis", "adolescent", "troponin", "cardiac", "chest",
                                               "pericarditis", "echocardiogram", "teenager",
                                               "inflammation", "heart"],
            },
            "safety for adults": {
                "injection site reactions": ["injection", "swelling", "redness", "soreness", "arm",
                                             "deltoid", "tenderness", "erythema", "local", "bruising"],
                "allergic reactions": ["anaphylaxis", "allergic", "epinephrine", "urticaria",
                                       "hypersensitivity", "polyethylene", "glycol", "rash", "histamine",
                                       "wheezing"],
            },
            "safety for elderly": {
                "frailty and adverse events": ["frailty", "nursing", "elderly", "falls", "delirium",
                                               "octogenarian", "residents", "geriatric", "mobility",
                                               "confusion"],
                "interactions with chronic medication": ["anticoagulant", "statin", "medication",
                                                         "polypharmacy", "warfarin", "interaction",
                                                         "prescription", "diabetic", "hypertension",
                                                         "insulin"],
            },
        },
    },
    "distribution": {
        "description": "Storage, manufacturing and delivery constraints of each vaccine.",
        "keywords": None,
        "children": {
            "cold chain storage": {
                "freezer requirements": ["freezer", "ultracold", "minus", "degrees", "thermal", "shipper",
                                         "dry", "ice", "refrigeration", "celsius"],
                "shelf life": ["shelf", "expiry", "thawed", "vial", "stability", "potency", "wastage",
                               "days", "discard", "lifetime"],
            },
            "manufacturing capacity": {
                "production scale": ["manufacturing", "bioreactor", "batch", "plant", "yield", "output",
                                     "lipid", "facility", "scale", "fill"],
                "supply agreements": ["contract", "procurement", "purchase", "delivery", "shipment",
                                      "allocation", "government", "consignment", "agreement", "tender"],
            },
        },
    },
}

OFF_TOPIC = [
    ["soil", "nitrogen", "phosphate", "clay", "humus", "loam", "potassium", "compost", "tillage", "acidity"],
    ["river", "aquifer", "silt", "drainage", "floodplain", "channel", "discharge", "meander", "estuary",
     "turbidity"],
]

TEMPLATES = [
    "Vaccine A recipients showed {a}, {b}, {c}, {d} and {e} findings.",
    "For Vaccine B, {a} and {b} were tracked with {c}, {d} and {e}.",
    "Investigators compared {a}, {b} and {c} alongside {d} and {e}.",
    "Both vaccines were assessed for {a}, {b}, {c}, {d} and {e}.",
    "Follow-up linked {a} and {b} with {c}, {d} and {e} in each arm.",
    "Clinicians recorded {a}, {b}, {c}, {d} and {e} after each dose.",
    "Registries summarized {a}, {b} and {c} together with {d} and {e}.",
    "The trial team reviewed {a}, {b}, {c}, {d} and {e} for both vaccines.",
    "Reports described {a} and {b} next to {c}, {d} and {e}.",
]

OFF_TEMPLATES = [
    "Field teams sampled sediment with {a}, {b}, {c}, {d} and {e}.",
    "The sediment cores held {a} and {b} beside {c}, {d} and {e}.",
    "Seasonal sediment transport moved {a}, {b} and {c} past {d} and {e}.",
    "Laboratory sediment assays related {a} and {b} to {c}, {d} and {e}.",
    "Survey crews mapped sediment rich in {a}, {b}, {c}, {d} and {e}.",
    "Monitoring linked sediment {a} and {b} to {c}, {d} and {e}.",
]

CUE_PHRASES = {
    "support": "favor Vaccine A over Vaccine B",
    "oppose": "favor Vaccine B over Vaccine A",
    "neutral": "show the two vaccines as indistinguishable",
    "irrelevant": "only concern trial logistics",
}


def cue(rng, vocab, stance):
    a, b, c = rng.sample(vocab, 3)
    return "Taken together, the %s, %s and %s findings %s." % (a, b, c, CUE_PHRASES[stance])


def leaves():
    out = []
    for aspect, spec in TREE.items():
        for mid, kids in spec["children"].items():
            for leaf, vocab in kids.items():
                out.append((aspect, mid, leaf, vocab))
    return out


def block(rng, vocab, templates, n=9):
    sentences = []
    for i in range(n):
        a, b, c, d, e = rng.sample(vocab, 5)
        sentences.append(templates[i % len(templates)].format(a=a, b=b, c=c, d=d, e=e))
    return sentences


def make_corpus():
    rng = random.Random(20240611)
    leaf_list = leaves()
    # (leaf index, stance) blocks per relevant document.
    docs = []
    for i in range(24):
        n_blocks = 2 + (i % 2)
        picks = []
        for _ in range(n_blocks):
            leaf = rng.randrange(len(leaf_list))
            stance = rng.choices(["support", "oppose", "neutral", "irrelevant"], [40, 25, 25, 10])[0]
            picks.append((leaf, stance))
        docs.append(picks)
    # Same paper, same aspect, opposite stances, kept apart by an unrelated block.
    docs[6] = [(4, "support"), (12, "neutral"), (4, "oppose")]
    docs[15] = [(9, "support"), (0, "neutral"), (9, "oppose")]
    for leaf in range(len(leaf_list)):
        if not any(b[0] == leaf for d in docs for b in d):
            docs[leaf % 24].append((leaf, "support"))

    records = []
    for i, picks in enumerate(docs):
        paras = []
        for leaf, stance in picks:
            vocab = leaf_list[leaf][3]
            paras.append(" ".join(block(rng, vocab, TEMPLATES) + [cue(rng, vocab, stance)]))
        title = "Comparative study %d of %s" % (i + 1, leaf_list[picks[0][0]][2])
        records.append({"doc_id": "p%02d" % (i + 1), "title": title, "text": "\n\n".join(paras)})
    for j in range(6):
        paras = [" ".join(block(rng, vocab, OFF_TEMPLATES)) for vocab in OFF_TOPIC]
        records.append({"doc_id": "x%02d" % (j + 1), "title": "Sediment survey %d" % (j + 1),
                        "text": "\n\n".join(paras)})
    return records


def interleave(a, b, n=10):
    out = []
    for x, y in zip(a, b):
        out += [x, y]
    return out[:n]


def node_keywords():
    kw = {}
    for aspect, spec in TREE.items():
        mids = list(spec["children"].items())
        for mid, kids in mids:
            vocab = list(kids.values())
            kw[mid] = interleave(vocab[0], vocab[1])
            for leaf, v in kids.items():
                kw[leaf] = list(v)
        kw[aspect] = spec["keywords"] or interleave(kw[mids[0][0]], kw[mids[1][0]])
    return kw


def description(label):
    return "Evaluates %s when comparing Vaccine A and Vaccine B." % label


def draft(label, keywords, desc=None):
    return {"label": label, "description": desc or description(label), "keywords": keywords}


def write_json(path, value):
    path.write_text(json.dumps(value, indent=2) + "\n")


def make_transcript(mock):
    mock.mkdir(parents=True, exist_ok=True)
    kw = node_keywords()
    write_json(mock / "coarse_aspects.json", {"default": {"response": {"aspects": [
        draft(a, kw[a], TREE[a]["description"]) for a in TREE]}}})

    extract_rules, filter_rules, sub_rules = [], [], []
    extras = ["comparative trial", "vaccine recipients", "follow-up period", "cohort analysis",
              "dose interval", "surveillance data", "regional registry", "observation window",
              "participant diary", "booster timing"]
    for label, words in kw.items():
        extract_rules.append({"contains": "focus on the aspect %s." % label,
                              "response": {"keywords": words + extras}})
        reply = {"keywords": words}
        entry = {"contains": "target aspect '%s'" % label, "response": reply}
        if label == "distribution":
            entry = {"contains": entry["contains"],
                     "responses": ["Sure, the keywords are freezer and shelf life.", reply]}
        if label == "safety":
            reply = {"keywords": [words[0], words[0].upper()] + words[1:5] + [words[4]] + words[5:]}
            entry["response"] = reply
        filter_rules.append(entry)
    for aspect, spec in TREE.items():
        mids = spec["children"]
        sub_rules.append({"contains": "parent_aspect: %s;" % aspect,
                          "response": {"subaspects": [draft(m, kw[m]) for m in mids]}})
        for mid, kids in mids.items():
            sub_rules.append({"contains": "parent_aspect: %s;" % mid,
                              "response": {"subaspects": [draft(l, kw[l]) for l in kids]}})
    write_json(mock / "keyword_extract.json", {"rules": extract_rules})
    write_json(mock / "keyword_filter.json", {"rules": filter_rules})
    write_json(mock / "subaspect_discovery.json", {"rules": sub_rules})

    write_json(mock / "relevance_judge.json", {
        "rules": [{"contains": "sediment", "response": {"answer": "No"}}],
        "default": {"response": {"answer": "Yes"}}})
    write_json(mock / "stance_detect.json", {"rules": [
        {"contains": CUE_PHRASES["support"], "response": {"stance": "supports_claim"}},
        {"contains": CUE_PHRASES["oppose"], "response": {"stance": "opposes_claim"}},
        {"contains": CUE_PHRASES["neutral"], "response": {"stance": "neutral_to_claim"}},
        {"contains": CUE_PHRASES["irrelevant"], "response": {"stance": "irrelevant_to_claim"}},
    ], "default": {"response": {"stance": "neutral_to_claim"}}})
    write_json(mock / "perspective_summarize.json", {"rules": [
        {"contains": "stance 'supports_claim'",
         "response": {"summary": "These segments report outcomes favoring Vaccine A on this aspect."}},
        {"contains": "stance 'opposes_claim'",
         "response": {"summary": "These segments report outcomes favoring Vaccine B on this aspect."}},
    ], "default": {"response": {"summary": "These segments find no meaningful difference between the vaccines."}}})
    write_json(mock / "eval_judge.json", {"rules": [
        {"contains": "[node_relevance]\nGiven the claim: %s, decide whether this path from the aspect "
                     "tree is relevant to the analysis of the claim: %s -> distribution -> "
                     "manufacturing capacity -> supply agreements" % (CLAIM, CLAIM),
         "response": {"score": 0, "rationale": "Procurement contracts say little about the claim."}},
        {"contains": "[path_granularity]\nGiven the claim: %s, decide whether this path from the aspect "
                     "tree has good granularity: %s -> efficacy -> real-world protection\n" % (CLAIM, CLAIM),
         "response": {"score": 0, "rationale": "Overlaps heavily with its parent."}},
        {"contains": "from parent node safety have",
         "response": {"score": 4, "rationale": "All populations are peers."}},
        {"contains": "[sibling_granularity]", "response": {"score": 3, "rationale": "Mostly consistent."}},
        {"contains": CUE_PHRASES["irrelevant"], "response": {"score": 0, "rationale": "Logistics only."}},
    ], "default": {"response": {"score": 1, "rationale": "Acceptable."}}})
    write_json(mock / "pairwise_judge.json", {"default": {"response": {"winner": "1"}}})


def main():
    corpus = make_corpus()
    with open(HERE / "fixture_corpus.jsonl", "w") as f:
        for r in corpus:
            f.write(json.dumps(r) + "\n")
    make_transcript(HERE / "mock")
    write_json(HERE / "fixture_config.json", {
        "claim": CLAIM, "max_depth": 3, "k_aspects": 5, "k_subaspects": 5, "k_keywords": 10,
        "pool_size": 100, "k_segments": 10, "delta": 0.5, "window": 10, "min_chars": 500,
        "llm_provider": "mock", "embedder": "hashed", "embed_dim": 256, "seed": 0})


if __name__ == "__main__":
    main()
