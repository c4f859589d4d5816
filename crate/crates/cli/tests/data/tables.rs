//! Published values for S6: the wild class representatives with (l, t, d), and
//! the almost smooth representatives with the word w for which the second
//! constituent of the square is n_w.

pub const TABLE2: &[(&str, u64, usize, usize)] = &[
    ("145623", 8, 7, 2),
    ("156342", 8, 7, 2),
    ("163452", 9, 8, 2),
    ("245613", 8, 7, 2),
    ("256134", 8, 7, 2),
    ("256341", 8, 7, 2),
    ("263451", 9, 8, 2),
    ("264513", 8, 7, 2),
    ("345612", 36, 26, 3),
    ("346152", 7, 6, 2),
    ("346512", 8, 7, 2),
    ("351624", 9, 8, 2),
    ("354612", 9, 8, 2),
    ("356124", 39, 28, 3),
    ("356142", 7, 6, 2),
    ("356241", 8, 7, 2),
    ("356412", 7, 6, 2),
    ("361452", 8, 7, 2),
    ("362451", 9, 8, 2),
    ("364152", 9, 8, 2),
    ("364512", 44, 31, 3),
    ("426351", 7, 6, 2),
    ("456123", 251, 146, 4),
    ("456132", 9, 8, 2),
    ("456231", 44, 31, 3),
    ("456312", 7, 6, 2),
    ("462351", 46, 33, 3),
    ("462513", 7, 6, 2),
    ("462531", 7, 6, 2),
    ("463512", 9, 8, 2),
    ("465231", 9, 8, 2),
    ("562341", 257, 150, 4),
    ("562431", 7, 6, 2),
    ("563412", 53, 37, 3),
    ("563421", 9, 8, 2),
    ("564231", 7, 6, 2),
    ("623451", 48, 35, 3),
    ("623541", 7, 6, 2),
    ("624351", 7, 6, 2),
    ("624531", 8, 7, 2),
    ("634521", 9, 8, 2),
    ("635241", 9, 8, 2),
    ("645231", 53, 37, 3),
];

pub const TABLE1: &[(&str, &str)] = &[
    ("125634", "112235463546"),
    ("126453", "112246354635"),
    ("135624", "113325462546"),
    ("136452", "113346254625"),
    ("145236", "112435243566"),
    ("145263", "112435246635"),
    ("146253", "112436254635"),
    ("146352", "114436253625"),
    ("146523", "112466352435"),
    ("153426", "113524352466"),
    ("153462", "113524356624"),
    ("153624", "113524362546"),
    ("153642", "113524663524"),
    ("154623", "115524362436"),
    ("156423", "112546352436"),
    ("163542", "113625463524"),
    ("164352", "114635243625"),
    ("164532", "114635463522"),
    ("215634", "221135463546"),
    ("216453", "221146354635"),
    ("235614", "223315461546"),
    ("236451", "223346154615"),
    ("245163", "221435146635"),
    ("246135", "221436143655"),
    ("246153", "221436154635"),
    ("246351", "224436153615"),
    ("246513", "221466351435"),
    ("251634", "223511463546"),
    ("253461", "223514356614"),
    ("253614", "223514361546"),
    ("253641", "223514663514"),
    ("254613", "225514361436"),
    ("256143", "221546154633"),
    ("256314", "223546351146"),
    ("256413", "221546351436"),
    ("261453", "224611354635"),
    ("263415", "223614361455"),
    ("263514", "223615361544"),
    ("263541", "223615463514"),
    ("264153", "224635114635"),
    ("264351", "224635143615"),
    ("264531", "224635463511"),
    ("265341", "226635143514"),
    ("325614", "332215461546"),
    ("326451", "332246154615"),
    ("346251", "334426152615"),
    ("351642", "132514663524"),
    ("352641", "332514662514"),
    ("356214", "332546251146"),
    ("361542", "132615463524"),
    ("362514", "332615261544"),
    ("362541", "332615462514"),
    ("364251", "334625142615"),
    ("364521", "334625462511"),
    ("365142", "136625143524"),
    ("365241", "336625142514"),
    ("365412", "136655241324"),
    ("426153", "241326154635"),
    ("426513", "241366251435"),
    ("426531", "241366552413"),
    ("436512", "441366251325"),
    ("463152", "443625113625"),
    ("463251", "443625132615"),
    ("463521", "443625362511"),
    ("465132", "146635143522"),
    ("465213", "246635241135"),
    ("465312", "146635241325"),
    ("564312", "154635241326"),
    ("625431", "261546352413"),
    ("632541", "362513462514"),
    ("635421", "362546352411"),
    ("645321", "463546352211"),
    ("653421", "663524352411"),
];
