"""
Per-category vocabulary the synthetic corpus is built from.

Every disease stem also has an entry in the packaged dictionary, so
generated queries can be annotated and matched. Symptom words only appear
in descriptions.
"""

DISEASE_STEMS: dict[str, tuple[str, ...]] = {
    "abdominal symptom": (
        "appendicitis", "hernia", "colic", "peritonitis",
        "ascites", "bloating", "cramps", "dyspepsia",
    ),
    "cardiovascular system symptom": (
        "angina", "arrhythmia", "hypertension", "tachycardia",
        "palpitations", "myocarditis", "embolism", "bradycardia",
    ),
    "digestive system symptom": (
        "gastritis", "diarrhea", "constipation", "nausea",
        "ulcer", "colitis", "reflux", "hepatitis",
    ),
    "head and neck symptom": (
        "migraine", "headache", "sinusitis", "tonsillitis",
        "otitis", "goiter", "pharyngitis", "laryngitis",
    ),
    "hemic and immune system": (
        "anemia", "leukemia", "lymphoma", "allergy",
        "lupus", "hemophilia", "sepsis", "neutropenia",
    ),
    "musculoskeleton system symptom": (
        "arthritis", "osteoporosis", "tendinitis", "bursitis",
        "scoliosis", "gout", "myalgia", "sprain",
    ),
    "nervous system symptom": (
        "epilepsy", "neuralgia", "meningitis", "sciatica",
        "neuropathy", "paralysis", "tremor", "encephalitis",
    ),
    "neurological and physiological symptom": (
        "insomnia", "vertigo", "dementia", "anxiety",
        "depression", "fatigue", "syncope", "amnesia",
    ),
    "nutrition, metabolism and development symptom": (
        "diabetes", "obesity", "malnutrition", "rickets",
        "scurvy", "dehydration", "hypoglycemia", "anorexia",
    ),
    "reproductive system symptom": (
        "endometriosis", "infertility", "prostatitis", "amenorrhea",
        "mastitis", "dysmenorrhea", "vaginitis", "orchitis",
    ),
    "respiratory and chest symptom": (
        "asthma", "bronchitis", "pneumonia", "influenza",
        "emphysema", "tuberculosis", "pleurisy", "fever",
    ),
    "skin and intergumentary tissue symptom": (
        "eczema", "psoriasis", "dermatitis", "acne",
        "urticaria", "rash", "cellulitis", "melanoma",
    ),
    "urinary system symptom": (
        "cystitis", "nephritis", "incontinence", "hematuria",
        "urolithiasis", "pyelonephritis", "dysuria", "enuresis",
    ),
}

SYMPTOM_WORDS: dict[str, tuple[str, ...]] = {
    "abdominal symptom": ("pain", "tenderness", "swelling", "distension"),
    "cardiovascular system symptom": ("dizziness", "breathlessness", "edema", "sweating"),
    "digestive system symptom": ("vomiting", "heartburn", "bleeding", "weight loss"),
    "head and neck symptom": ("earache", "sore throat", "hoarseness", "congestion"),
    "hemic and immune system": ("pallor", "bruising", "infections", "night sweats"),
    "musculoskeleton system symptom": ("stiffness", "joint pain", "weakness", "deformity"),
    "nervous system symptom": ("seizures", "numbness", "tingling", "spasms"),
    "neurological and physiological symptom": (
        "confusion", "restlessness", "memory loss", "drowsiness",
    ),
    "nutrition, metabolism and development symptom": (
        "thirst", "weight gain", "growth delay", "polyuria",
    ),
    "reproductive system symptom": ("discharge", "pelvic pain", "irregular cycles", "itching"),
    "respiratory and chest symptom": ("cough", "chest pain", "wheezing", "shortness of breath"),
    "skin and intergumentary tissue symptom": ("redness", "scaling", "blisters", "lesions"),
    "urinary system symptom": ("urgency", "burning", "frequency", "flank pain"),
}

DRUGS: dict[str, tuple[str, ...]] = {
    "abdominal symptom": (
        "omeprazole", "hyoscine", "simethicone", "metronidazole", "ceftriaxone", "loperamide",
    ),
    "cardiovascular system symptom": (
        "amlodipine", "bisoprolol", "atorvastatin", "warfarin", "nitroglycerin", "digoxin",
    ),
    "digestive system symptom": (
        "ranitidine", "lactulose", "mesalazine", "ondansetron", "pantoprazole", "ursodiol",
    ),
    "head and neck symptom": (
        "sumatriptan", "amoxicillin", "ibuprofen", "paracetamol", "levothyroxine", "fluticasone",
    ),
    "hemic and immune system": (
        "ferrous sulfate", "imatinib", "rituximab", "cetirizine", "hydroxychloroquine",
        "filgrastim",
    ),
    "musculoskeleton system symptom": (
        "naproxen", "alendronate", "colchicine", "diclofenac", "allopurinol", "methotrexate",
    ),
    "nervous system symptom": (
        "carbamazepine", "gabapentin", "pregabalin", "levetiracetam", "valproate", "propranolol",
    ),
    "neurological and physiological symptom": (
        "melatonin", "betahistine", "donepezil", "sertraline", "fluoxetine", "zolpidem",
    ),
    "nutrition, metabolism and development symptom": (
        "metformin", "insulin", "orlistat", "cholecalciferol", "ascorbic acid", "glucagon",
    ),
    "reproductive system symptom": (
        "letrozole", "clomiphene", "tamsulosin", "progesterone", "clotrimazole", "doxycycline",
    ),
    "respiratory and chest symptom": (
        "salbutamol", "budesonide", "oseltamivir", "azithromycin", "isoniazid", "montelukast",
    ),
    "skin and intergumentary tissue symptom": (
        "hydrocortisone", "isotretinoin", "calcipotriol", "tacrolimus", "loratadine",
        "fusidic acid",
    ),
    "urinary system symptom": (
        "nitrofurantoin", "oxybutynin", "trimethoprim", "potassium citrate", "desmopressin",
        "solifenacin",
    ),
}

QUALIFIERS: tuple[str, ...] = (
    "acute", "chronic", "recurrent", "mild", "severe", "viral", "bacterial", "congenital",
)
