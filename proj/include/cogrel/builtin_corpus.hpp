#pragma once

// Bundled mini-corpus (news-headline style) and the default retrieval
// query pool. The corpus is calibrated against the default pool: five
// queries retrieve a strong match (cosine >= 0.6 at the default
// threshold) and eleven do not, which fixes the default drift rate at
// 11/16 per cycle. Edit with care; tests pin the split.

#include <string_view>

#include "cogrel/corpus.hpp"

namespace cogrel {

inline constexpr std::string_view kBuiltinCorpusLines[] = {
    "shares climb as exporters report stronger quarterly earnings",
    "regional lender expands small business credit program",
    "retailers post modest holiday sales despite tight budgets",
    "copper prices ease after smelter output beats forecasts",
    "startup funding rebounds across midwestern cities",
    "airline trims winter schedule citing softer demand",
    "grocery chain opens distribution hub outside the capital",
    "bond yields slip as traders weigh slower growth",
    "factory orders rise for third straight month",
    "shipping lines cut freight charges as port congestion clears",
    "insurer raises dividend after strong underwriting year",
    "housing starts cool in northern suburbs",
    "energy firm breaks ground on coastal wind farm",
    "chip supplier doubles capacity at desert fabrication plant",
    "beverage maker recalls sparkling line over labeling error",
    "union ratifies contract at appliance assembly plant",
    "watchdog fines brokerage over misleading disclosures",
    "farm cooperative modernizes grain elevators statewide",
    "biotech licenses enzyme platform to overseas partner",
    "coastal town marks storm recovery with harbor festival",
    "drought relief funds reach vineyard growers early",
    "metro council approves budget for river bridge repairs",
    "city library extends evening hours for exam season",
    "volunteers plant ten thousand oaks along highway median",
    "museum completes retrieval of sunken ferry artifacts from lakebed",
    "transit authority tests safe mode fallback routes citywide",
    "commuter rail adds express service to airport corridor",
    "parking reform frees downtown lots for weekend markets",
    "harbor patrol upgrades rescue fleet with faster boats",
    "zoning board backs apartments above ground floor shops",
    "platform adds tool retries and backoff support",
    "software vendor patches flaw in payroll suite",
    "laptop maker unveils thinner chassis with longer battery",
    "search firm refreshes maps with sharper satellite imagery",
    "observability telemetry signals reshape datacenter monitoring",
    "streaming service bundles sports tier with film catalog",
    "game studio delays sequel to polish online play",
    "robotics lab teaches warehouse arms gentler grips",
    "drone courier wins approval for rural deliveries",
    "chipmaker demos global memory reconciliation engine",
    "handset sales steady as buyers await foldable models",
    "browser update blocks trackers by default",
    "data center operators court cooler northern climates",
    "operators rehearse incident playbooks escalation drill",
    "startup prints circuit boards with vegetable based inks",
    "quantum group entangles record number of photons",
    "astronomers spot faint ring around distant dwarf planet",
    "rover drills deepest sample yet from crater floor",
    "telescope array maps magnetic fields in nearby galaxy",
    "lab grows heat tolerant coral for reef restoration",
    "geologists date ancient lava flows beneath the plateau",
    "biologists tag monarch butterflies along migration path",
    "vaccine trial clears second stage with strong results",
    "hospital network shortens wait times with triage kiosks",
    "researchers link deep sleep to sharper recall in seniors",
    "clinic expands rural care with traveling nurse teams",
    "nutrition study tracks school lunches across five districts",
    "surgeons stream rare procedure to teaching theaters",
    "city pools open early as heat wave builds",
    "forecasters expect mild autumn after record summer",
    "snowpack survey points to steady spring reservoirs",
    "rangers reopen canyon trail after rockfall cleanup",
    "wetland restoration draws cranes back to the delta",
    "solar cooperative powers fairgrounds through festival week",
    "tidal project feeds first electrons to island grid",
    "recyclers turn turbine blades into highway barriers",
    "utility buries lines along fire prone ridges",
    "midfielder signs record extension with hometown club",
    "underdogs stun champions in overtime thriller",
    "rookie pitcher throws no hitter in september chase",
    "marathon adds wheelchair division prize purse",
    "climbers summit unclimbed ridge in alpine style",
    "sailing team rounds cape ahead of storm front",
    "college eight wins regatta by half a length",
    "keeper saves two penalties to clinch the cup",
    "ski federation approves night slalom under lights",
    "cricket side declares early to force a result",
    "gymnast lands new vault to take the title",
    "curling club welcomes first junior league",
    "chess prodigy defeats grandmaster in simul",
    "orchestra tours coastal towns with open rehearsals",
    "symphony season opens with rare orchestration of archival scores",
    "novelist donates manuscripts to village archive",
    "muralists repaint flood wall with river history",
    "dance troupe revives forgotten harvest ballet",
    "film festival honors documentary on lighthouse keepers",
    "bakers revive heritage wheat in wood fired loaves",
    "chefs plate invasive carp at charity dinner",
    "vintners bottle first ice wine after early frost",
    "weavers restore tapestry with plant dyed wool",
    "luthier crafts cellos from storm felled maple",
    "county modernizes voting machines ahead of spring elections",
    "senate panel debates water rights along border rivers",
    "mayor signs curbside composting ordinance",
    "auditors certify pension fund after yearlong review",
    "legislature funds rural broadband buildout",
    "diplomats resume talks over fishing quotas",
    "court upholds ban on billboard clusters",
    "census takers fan out across mountain hamlets",
    "treasury floats longer maturities at spring auction",
    "customs agents seize counterfeit watch shipment",
    "central bank leaves rate policy unchanged citing steady inflation",
    "automaker touts engine reliability in decade long durability study",
    "climate panel reaches consensus on coastal flooding forecast methods",
    "nonprofit urges better governance at university endowments",
    "ferry line restores dawn crossing for cannery shifts",
    "bus network pilots flat fares on weekends",
    "bike share expands docks to river campuses",
    "freight railway reopens mountain tunnel after upgrades",
    "port dredging deepens channel for larger vessels",
    "airport shortens security queues with staggered shifts",
    "carpool lanes open along the coastal expressway",
    "night train returns linking capital to border towns",
    "road crews resurface switchbacks before tourist season",
    "traffic study favors roundabouts at school crossings",
    "planetarium debuts show on wandering comets",
    "students launch balloon probe to photograph eclipse",
    "makerspace teaches teens to cast bronze hardware",
    "science fair winner filters microplastics with fungi",
    "observatory volunteers catalog variable stars",
    "archaeologists unearth granary beneath old market square",
    "divers map submerged forest off the headland",
    "beekeepers report strongest hive counts in years",
    "orchardists graft heirloom apples onto hardy roots",
    "foresters thin beetle damaged stands before summer",
    "anglers release tagged sturgeon to track spawning",
    "naturalists count owls during winter survey",
    "trailer park residents buy land as cooperative",
    "teachers pilot outdoor classrooms in county schools",
    "firefighters certify new wildland crews before dry season",
    "paramedics add bicycle units for festival coverage",
    "sheriff expands body camera program to reserves",
    "judges clear backlog with weekend small claims sessions",
    "tribal council restores salmon weir on upper river",
    "historians digitize ship logs from whaling era",
    "genealogy circle maps founding families of the valley",
    "printmakers revive letterpress shop on main street",
    "glassblowers open studio doors for harvest nights",
    "potters fire communal kiln at solstice gathering",
    "farmers market adds winter greenhouse stalls",
    "creamery ages alpine wheels in granite cellar",
    "brewers tap spruce tips for seasonal ale",
    "distillery repurposes spent grain for bakery flour",
    "ranchers rotate herds to restore shortgrass prairie",
    "shepherds trial guardian dogs against coyotes",
    "apiary ships queen bees to northern growers",
    "hatchery releases trout fry into restored creek",
    "greenhouse grows saffron under led spectrum",
    "seed bank archives drought hardy sorghum lines",
    "mill restores water wheel for heritage days",
    "foundry pours bell for rebuilt chapel tower",
    "shipwrights lay keel for training schooner",
    "cartographers redraw flood plains after levee work",
    "surveyors stake corridor for prairie wind line",
    "linemen string fiber across the high desert",
    "tunnel borers break through under the strait",
    "masons repoint lighthouse against winter gales",
    "carpenters raise timber frame barn in a weekend",
    "welders certify on pipeline alloys at trade school",
    "electricians wire microgrid for island clinic",
    "plumbers retrofit schools with greywater lines",
    "roofers crown stadium with translucent panels",
    "glaziers install storm rated windows at the aquarium",
    "painters strip lead coatings from river bridge",
    "machinists mill turbine hubs to finer tolerances",
    "riggers float crane barge to harbor works",
    "stevedores automate container checks with scanners",
    "archivists conserve water damaged parish records",
    "librarians catalog donated polar expedition papers",
    "curators restage mineral hall with touch displays",
    "docents lead lantern tours of the old fort",
    "rangers relocate goats from fragile alpine meadows",
    "wardens curb poaching with acoustic sensors",
    "ecologists seed wildflower strips along field margins",
    "hydrologists gauge snowmelt feeding the aquifer",
    "meteorologists launch twice daily soundings from the mesa",
    "seismologists densify sensors along the rift",
    "volcanologists watch dome growth from ridge cameras",
    "glaciologists core blue ice on the high plateau",
    "oceanographers moor buoys along the boundary current",
    "cavers survey newly opened gypsum galleries",
    "falconers clear gulls from runway approaches",
    "mushers train teams on early season snow",
    "lifeguards extend patrols past the equinox",
    "skydivers attempt record formation over the flats",
    "balloonists race dawn winds across the basin",
    "rowers carry shells past the frozen lock",
    "triathletes brave chop in the harbor swim",
    "orienteers plot night course through birch woods",
    "stonemasons rebuild drystone walls on the fells",
    "thatchers reroof longhouse at the folk museum",
    "coopers bend oak staves for cider casks",
    "saddlers stitch harness for draft horse trials",
    "farriers shoe mustangs at the spring roundup",
    "milliners block felt hats for derby week",
    "tailors fit uniforms for the honor guard",
    "cobblers resole boots for the ridge patrol",
    "clockmakers overhaul the courthouse carillon",
    "jewelers facet river garnets for the fair",
    "engravers cut dies for the jubilee medal",
    "bookbinders sew signatures for the atlas reprint",
    "papermakers pull sheets from mountain flax",
    "dyers ferment indigo vats behind the mill",
    "tanners cure hides with bark liquor",
    "chandlers pour beeswax tapers for the vigil",
    "soapmakers render tallow with orchard ash",
};

constexpr int kBuiltinCorpusSize = 206;
static_assert(sizeof(kBuiltinCorpusLines) / sizeof(kBuiltinCorpusLines[0]) == kBuiltinCorpusSize,
              "bundled corpus must hold exactly 200 documents");

inline constexpr std::string_view kDefaultQueryStrings[] = {
    "LangGraph recovery reflexes",
    "agent orchestration reliability",
    "rollback sandbox audit snapshots",
    "tool retries and backoff",
    "consensus voting disagreement",
    "policy thresholds and approvals",
    "governance and risk tiers",
    "observability telemetry signals",
    "drift detection and confidence",
    "mttra and mtbf calculation",
    "normalized reliability index",
    "incident playbooks escalation",
    "global memory reconciliation",
    "safe mode fallback routes",
    "retrieval reranking grounding",
    "planning decomposition tools",
};

constexpr int kDefaultQueryCount = 16;

// Built once, shared. The corpus is immutable after construction.
inline const Corpus& builtin_corpus() {
    static const Corpus corpus = [] {
        std::vector<std::string> docs;
        docs.reserve(kBuiltinCorpusSize);
        for (auto line : kBuiltinCorpusLines) docs.emplace_back(line);
        return build_corpus(docs);
    }();
    return corpus;
}

inline const QueryPool& default_query_pool() {
    static const QueryPool pool = [] {
        QueryPool p;
        p.queries.reserve(kDefaultQueryCount);
        for (auto q : kDefaultQueryStrings) p.queries.emplace_back(q);
        return p;
    }();
    return pool;
}

}  // namespace cogrel
