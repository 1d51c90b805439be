package fixtures.staticlocal;

import static org.apache.commons.lang3.StringUtils.isEmpty;

// The class's own isEmpty hides the imported one.
public class LocalMethod {
    public boolean check(String s) {
        return isEmpty(s);
    }

    private boolean isEmpty(String s) {
        return s == null || s.length() == 0;
    }
}
