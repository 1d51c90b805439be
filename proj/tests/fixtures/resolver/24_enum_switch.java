package fixtures.enums;

import com.google.gson.FieldNamingPolicy;
import com.google.gson.GsonBuilder;

public enum Naming {
    UPPER, LOWER;

    public GsonBuilder apply(GsonBuilder builder) {
        switch (this) {
            case UPPER:
                return builder.setFieldNamingPolicy(FieldNamingPolicy.UPPER_CAMEL_CASE); //@use com.google.gson.GsonBuilder.setFieldNamingPolicy/1
            default:
                return builder;
        }
    }
}
