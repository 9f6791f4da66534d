// Scenario I, S = 4, rho = 2, omega = 1: (mu, sigma2, delta) per action.
pub const RESCALE: f64 = 1.0000003449999404714;
pub const BEST: usize = 0;
pub const TABLE: [(f64, f64, f64); 35] = [
    (0.73669974583863156185, 1.770599734143137545, 0.0),
    (0.69752475935399955165, 1.7051997567061258817, 0.012949995532252357076),
    (0.65834977286936754146, 1.6397997792691142184, 0.025899991064504714153),
    (0.61917478638473553126, 1.574399801832102555, 0.038849986596757071229),
    (0.57999979990010352106, 1.5089998243950908917, 0.051799982129009428305),
    (0.63297478162373802976, 1.6504997755776161162, 0.087349969864265635372),
    (0.59379979513910601956, 1.5850997981406044529, 0.10029996539651799245),
    (0.55462480865447400936, 1.5196998207035927895, 0.11324996092877034952),
    (0.51544982216984199916, 1.4542998432665811262, 0.1261999564610227066),
    (0.52924981740884449766, 1.5303998170120946874, 0.17469993972853127074),
    (0.49007483092421248746, 1.464999839575083024, 0.18764993526078362782),
    (0.45089984443958047726, 1.3995998621380713607, 0.2005999307930359849),
    (0.42552485319395096556, 1.4102998584465732585, 0.26204990959279690612),
    (0.38634986670931895537, 1.3448998810095615952, 0.27499990512504926319),
    (0.32179988897905743347, 1.2901998998810518297, 0.34939987945706254149),
    (0.58542479802847954449, 1.6405997789931143425, 0.17254994047028083221),
    (0.54624981154384753429, 1.5751998015561026792, 0.18549993600253318929),
    (0.50707482505921552409, 1.5097998241190910158, 0.19844993153478554636),
    (0.46789983857458351389, 1.4443998466820793525, 0.21139992706703790344),
    (0.48169983381358601239, 1.5204998204275929137, 0.25989991033454646758),
    (0.44252484732895400219, 1.4550998429905812503, 0.27284990586679882466),
    (0.403349860844321992, 1.389699865553569587, 0.28579990139905118173),
    (0.3779748695986924803, 1.4003998618620714848, 0.34724988019881210295),
    (0.3387998831140604701, 1.3349998844250598215, 0.36019987573106446003),
    (0.2742499053837989482, 1.280299903296550056, 0.43459985006307773833),
    (0.43414985021832752713, 1.51059982384309114, 0.34509988094056166442),
    (0.39497486373369551693, 1.4451998464060794766, 0.35804987647281402149),
    (0.35579987724906350673, 1.3797998689690678133, 0.37099987200506637857),
    (0.33042488600343399503, 1.3904998652775697112, 0.43244985080482729979),
    (0.29124989951880198483, 1.3250998878405580478, 0.44539984633707965687),
    (0.22669992178854046293, 1.2703999067120482823, 0.51979982066909293516),
    (0.28287490240817550976, 1.3805998686930679375, 0.51764982141084249663),
    (0.24369991592354349956, 1.3151998912560562741, 0.5305998169430948537),
    (0.17914993819328197767, 1.2604999101275465086, 0.604999791275108132),
    (0.1315999545980234924, 1.2505999135430447349, 0.69019976188112332884),
];
