/*
 * Bundled baseline conversation: a fixed 114-message biomedical exchange on
 * cancer-associated fibroblast analysis in pancreatic adenocarcinoma, with
 * precise dataset facts, evolving thresholds and a hypothesis pivot.
 */
#pragma once

#include <utility>
#include <vector>

#include "dualmem/message.hpp"
#include "dualmem/tokens.hpp"

namespace dualmem {

inline std::vector<Message> baseline_scenario(const TokenCounter& counter = {}) {
    // 57 user/agent exchanges; threshold facts evolve 0.05 -> 0.01 -> 0.001,
    // fold-change 1.0 -> 1.5 -> 2.0, and the hypothesis pivots from FAP+
    // CAFs to PDGFR-beta+ pericytes.
    static const std::pair<const char*, const char*> kExchanges[] = {
        {"Starting a fresh look at cancer associated fibroblasts in pancreatic adenocarcinoma.",
         "Workspace ready; the CAF analysis project is initialized."},
        {"Working hypothesis for the record: FACT hypothesis=FAP+ CAFs drive chemoresistance; we will stress-test it.",
         "Hypothesis logged: FAP+ CAFs drive chemoresistance."},
        {"Primary cohort: FACT dataset=TCGA-PAAD; pull the harmonized expression matrix.",
         "TCGA-PAAD harmonized matrix queued for download."},
        {"Cohort size after QC: FACT sample_count=178; exactly that, not approximately.",
         "Registered 178 usable samples for the analysis."},
        {"Marker panel to track: FACT marker_genes=FAP, ACTA2, PDGFRB; include them in every figure.",
         "Panel saved: FAP, ACTA2, PDGFRB will annotate all plots."},
        {"First-pass significance: FACT p_threshold=0.05; standard screening level.",
         "Significance threshold set to p<0.05 for the screen."},
        {"Effect-size floor: FACT log2fc_cutoff=1.0; weaker hits stay out of the tables.",
         "Fold-change cutoff recorded at log2FC>1.0."},
        {"File uploaded successfully, the raw counts archive is in place.",
         "Counts archive detected; dimensions match the manifest."},
        {"Visualization preference: FACT viz_method=volcano plot; label the panel genes.",
         "Volcano plots with labeled markers set as the default view."},
        {"Statistics preference: FACT stats_method=Benjamini-Hochberg FDR; apply it to every contrast.",
         "Benjamini-Hochberg FDR will correct all reported p-values."},
        {"Quick sanity check, did the normalization finish overnight?",
         "Yes, normalization completed; QC metrics look nominal."},
        {"Kick off the differential expression run for tumor versus adjacent tissue.",
         "Differential run started under the current thresholds."},
        {"Coffee first, then we read the volcano plot together.",
         "Standing by; the first figure will be ready shortly."},
        {"Share the top table when it lands, please.",
         "Top table exported with the panel genes highlighted."},
        {"FAP comes up strong, as expected under the working hypothesis.",
         "Agreed, FAP ranks near the top of the differential list."},
        {"Let us do a clarification pass on the clinical covariates.",
         "Covariate sheet opened; stage and grade fields verified."},
        {"Stratify survival by FAP-high versus FAP-low expression.",
         "Kaplan-Meier stratification queued for the FAP groups."},
        {"File uploaded successfully, the clinical endpoints table is current.",
         "Endpoints table ingested; follow-up fields parsed cleanly."},
        {"The first screen is noisy; tighten it: FACT p_threshold=0.01; rerun the contrast.",
         "Threshold updated to p<0.01; rerunning the differential contrast."},
        {"While that runs, summarize the ACTA2 distribution across samples.",
         "ACTA2 shows a bimodal pattern consistent with stromal content."},
        {"Any batch effects visible in the principal component view?",
         "Two sequencing centers separate on PC3; correction recommended."},
        {"Apply the batch correction and keep everything else fixed.",
         "Batch term added; corrected matrix saved alongside the raw one."},
        {"Thanks, that all looks cleaner on the new projection.",
         "Agreed, the center split collapses after correction."},
        {"How many genes survive the tightened screen now?",
         "Eighty-two genes pass p<0.01 with the current fold-change floor."},
        {"Raise the effect floor too: FACT log2fc_cutoff=1.5; the table is still long.",
         "Fold-change cutoff moved to log2FC>1.5; table regenerated."},
        {"Better. Keep PDGFRB on the watchlist either way.",
         "PDGFRB stays annotated regardless of rank."},
        {"Run the pathway enrichment on the surviving set.",
         "Enrichment finished; stromal remodeling terms dominate."},
        {"File uploaded successfully, the single-cell reference is staged.",
         "Single-cell reference indexed for deconvolution."},
        {"Deconvolve the bulk profiles against that reference.",
         "Deconvolution complete; fibroblast fractions estimated per sample."},
        {"Interesting, the FAP signal tracks fibroblast fraction closely.",
         "Correct, much of the FAP effect may be compositional."},
        {"Control for fibroblast fraction in the survival model.",
         "Adjusted model queued with fraction as a covariate."},
        {"Quick break, back in twenty minutes.",
         "No problem, I will hold the session state."},
        {"What does the adjusted survival model say about FAP?",
         "After adjustment the FAP association weakens substantially."},
        {"Hm. Check PDGFRB in the same adjusted framework.",
         "PDGFRB remains significant after compositional adjustment."},
        {"Pull the pericyte signature scores for all 178 samples.",
         "Pericyte scores computed; PDGFRB-high samples enrich strongly."},
        {"Cross-check ACTA2 so we separate myofibroblasts from pericytes.",
         "ACTA2 and PDGFRB only partially overlap; populations look distinct."},
        {"Draft a supplementary figure contrasting the two populations.",
         "Supplementary panel drafted with the volcano and score violins."},
        {"Final stringency for the paper: FACT p_threshold=0.001; lock it in.",
         "Locked: significance now requires p<0.001 everywhere."},
        {"Rerun everything end to end under the locked threshold.",
         "Full pipeline rerun scheduled under p<0.001."},
        {"File uploaded successfully, the revised metadata sheet is in.",
         "Metadata revision merged; sample labels reconciled."},
        {"Any samples drop out after the metadata reconciliation?",
         "None; the cohort stays at the registered 178 samples."},
        {"Good. How stable are the pericyte findings across bootstraps?",
         "Pericyte association replicates in 96 percent of bootstrap draws."},
        {"Show me the effect sizes for the top pericyte markers.",
         "PDGFRB leads with a strong, stable effect under the locked screen."},
        {"Tighten the reporting floor: FACT log2fc_cutoff=2.0; final tables only.",
         "Reporting floor raised to log2FC>2.0 for the final tables."},
        {"Does FAP survive the final stringency at all?",
         "FAP falls below the final thresholds after adjustment."},
        {"Prepare a clean comparison: original screen versus final screen.",
         "Comparison table built across both threshold regimes."},
        {"Walk me through the candidate mechanism once more.",
         "Pericyte-derived signaling plausibly mediates the resistance effect."},
        {"Time to say it plainly: FACT hypothesis=PDGFR-beta+ pericytes are the primary mechanism; the FAP story did not replicate.",
         "Hypothesis updated: PDGFR-beta+ pericytes are the primary mechanism."},
        {"Archive the superseded FAP-centric analysis for the appendix.",
         "FAP-era outputs archived with their original thresholds noted."},
        {"Draft the methods paragraph with the locked parameters.",
         "Methods drafted citing p<0.001 and log2FC>2.0 as final cutoffs."},
        {"Double-check that every figure states the cohort size.",
         "All figures now state the 178-sample cohort explicitly."},
        {"File uploaded successfully, reviewer checklist is in the folder.",
         "Checklist parsed; two visualization items remain open."},
        {"Close the visualization items using the volcano defaults.",
         "Done; labeled volcano panels satisfy both checklist items."},
        {"Anything inconsistent left between the text and the tables?",
         "No remaining mismatches between narrative and tabulated values."},
        {"Great session. Queue the validation cohort work for next week.",
         "Validation cohort intake scheduled; profile carried forward."},
        {"Log today as the pivot milestone in the project notes.",
         "Milestone recorded: pericyte mechanism adopted as primary."},
        {"Thanks, wrapping up for today.",
         "Session saved; everything is consolidated and ready to resume."},
    };
    static_assert(std::size(kExchanges) == 57, "baseline scenario must serialize to 114 messages");

    std::vector<Message> out;
    out.reserve(114);
    std::uint64_t idx = 0;
    for (const auto& [user, agent] : kExchanges) {
        out.push_back(make_message(Role::user, user, idx, counter));
        ++idx;
        out.push_back(make_message(Role::agent, agent, idx, counter));
        ++idx;
    }
    return out;
}

}  // namespace dualmem
